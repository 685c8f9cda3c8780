#pragma once

// Executes one RunConfig and writes its artifacts:
//   <output>/<kind>.csv (steady-state: <output>/steady-state.json)
//   <output>/<kind>.meta.json  echoed config, version, grid, wall time, error

#include <filesystem>
#include <string>

#include "fourlevel/config.hpp"

namespace fourlevel {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  int threads = 0;  // 0: every hardware thread; 1: sequential
};

struct RunReport {
  bool ok = false;
  std::filesystem::path data_path;
  std::filesystem::path meta_path;
  std::string error;  // empty on success
};

/// Never throws for simulation failures: they are returned in the report and
/// written into the sidecar, and no data file is left behind.
RunReport run(const RunConfig& config, const RunOptions& options = {});

/// The CSV number format: printf %.17g.
std::string format_number(double value);

}  // namespace fourlevel
