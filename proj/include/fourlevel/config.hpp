#pragma once

// Run configurations: a JSON document naming one sweep plus the physical
// setup, with strict key checking and every default written back on emit.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fourlevel/atom_model.hpp"
#include "fourlevel/propagation.hpp"

namespace fourlevel {

enum class SweepKind { Spectrum, Switch, Cavity, Pulse, SaRsa, SteadyState };

const char* to_string(SweepKind kind);
std::optional<SweepKind> sweep_kind_from(std::string_view name);

enum class GridSpacing { Linear, Log };

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  GridSpacing spacing = GridSpacing::Linear;

  std::vector<double> values() const;
  bool operator==(const GridSpec&) const = default;
};

/// Grid used when a config for this kind has none; nullopt for kinds
/// without a sweep axis (pulse, steady-state).
std::optional<GridSpec> default_grid(SweepKind kind);

struct CavityBlock {
  double C = 400.0;
  double delta0 = 0.0;

  bool operator==(const CavityBlock&) const = default;
};

struct PulseBlock {
  double sigma_rad_per_s = 0.0;
  double peak_rabi = 0.1;
  int points = 4096;
  double span_sigmas = 16.0;
  double spectral_cutoff = 1e-20;

  bool operator==(const PulseBlock&) const = default;
};

struct RunConfig {
  SweepKind kind = SweepKind::Spectrum;
  std::string preset;  // informational; empty for hand-written configs
  AtomicSystem system = AtomicSystem::ladder(1.0, 1.0, 1.0);
  double gamma_rad_per_s = 0.0;  // the unit gamma in rad/s; 0 when not given
  DriveSet drives;
  MediumSpec medium;
  std::optional<GridSpec> grid;
  std::optional<CavityBlock> cavity;
  std::optional<PulseBlock> pulse;
  std::string output = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError: syntax errors carry line/column, validation errors
/// name the offending field.
RunConfig parse_config(std::string_view text);

/// Pretty-printed JSON with every field explicit; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Re-checks cross-field consistency (blocks present for the kind, scheme
/// restrictions, physical parameter ranges). Throws ConfigError.
void validate(const RunConfig& config);

/// Switches the sweep kind, installing that kind's default grid when the
/// kind changes.
RunConfig retarget(RunConfig config, SweepKind kind);

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
RunConfig preset(std::string_view name);

}  // namespace fourlevel
