#pragma once

// Parameter sweeps over independent propagation runs.

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fourlevel/propagation.hpp"

namespace fourlevel {

/// One atomic system, entry drives and medium; sweeps vary one quantity.
struct Experiment {
  AtomicSystem system;
  DriveSet drives;
  MediumSpec medium;
};

struct SweepResult {
  std::string axis_name;
  std::vector<double> axis;
  std::vector<std::pair<std::string, std::vector<double>>> columns;

  /// Throws SimulationError(Parameter) for an unknown column.
  const std::vector<double>& column(std::string_view name) const;
};

std::vector<double> linspace(double lo, double hi, int count);
std::vector<double> logspace(double lo, double hi, int count);

/// Probe transmission versus delta2 at fixed entry amplitudes. Columns: T2,
/// |probe coherence| at the exit, exit populations rho22..rho44.
/// threads = 0 uses every hardware thread.
SweepResult probe_spectrum(const Experiment& experiment, std::span<const double> delta2_grid,
                           int threads = 0);

/// Probe transmission versus control intensity |G|^2 (control phase taken
/// from experiment.drives.control, real positive if that is zero).
SweepResult switching_curve(const Experiment& experiment, std::span<const double> intensity_grid,
                            int threads = 0);

/// Y-type net probe transmission versus entry intensity |g(0)|^2, without
/// (T_off) and with (T_on, amplitude experiment.drives.control) the control.
SweepResult sa_rsa_curve(const Experiment& experiment, std::span<const double> intensity_grid,
                         int threads = 0);

struct Extremum {
  enum class Kind { Min, Max };
  double axis = 0.0;
  double value = 0.0;
  Kind kind = Kind::Min;
};

/// Strict interior local extrema by three-point comparison, each refined by
/// the vertex of the parabola through its neighbours. Throws Resolution for
/// fewer than three points.
std::vector<Extremum> spectrum_extrema(const SweepResult& result, std::string_view column);

}  // namespace fourlevel
