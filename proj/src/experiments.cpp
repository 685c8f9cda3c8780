#include "fourlevel/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "fourlevel/errors.hpp"
#include "fourlevel/parallel.hpp"

namespace fourlevel {
namespace {

void check_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) {
    throw SimulationError(ErrorKind::Parameter, std::string(what) + " grid is empty");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || (k > 0 && !(grid[k] > grid[k - 1]))) {
      throw SimulationError(ErrorKind::Parameter,
                            std::string(what) + " grid must be finite and strictly increasing");
    }
  }
}

Complex unit_phase(Complex z) { return z == Complex{} ? Complex{1.0} : z / std::abs(z); }

double exit_transmission(const Propagator& prop, const FieldAmplitudes& entry, Field f) {
  const auto out = prop.exit(entry);
  const auto k = static_cast<std::size_t>(f);
  if (entry[k] == Complex{}) {
    throw SimulationError(ErrorKind::UndefinedTransmission, "zero entry probe amplitude");
  }
  return std::norm(out[k]) / std::norm(entry[k]);
}

}  // namespace

const std::vector<double>& SweepResult::column(std::string_view name) const {
  for (const auto& [key, values] : columns) {
    if (key == name) return values;
  }
  throw SimulationError(ErrorKind::Parameter, "no column named " + std::string(name));
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw SimulationError(ErrorKind::Parameter, "grid needs at least one point");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (int k = 0; k < count; ++k) {
    v[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  }
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0)) {
    throw SimulationError(ErrorKind::Parameter, "log grid bounds must be positive");
  }
  auto v = linspace(std::log10(lo), std::log10(hi), count);
  for (double& x : v) x = std::pow(10.0, x);
  v.front() = lo;
  if (count > 1) v.back() = hi;
  return v;
}

SweepResult probe_spectrum(const Experiment& experiment, std::span<const double> delta2_grid,
                           int threads) {
  check_grid(delta2_grid, "delta2");
  check_drives(experiment.system, experiment.drives);
  check_medium(experiment.medium, experiment.system.scheme());

  struct Point {
    double t2, coherence, rho22, rho33, rho44;
  };
  const auto points = parallel_map(delta2_grid.size(), threads, [&](std::size_t i) {
    DriveSet drives = experiment.drives;
    drives.delta2 = delta2_grid[i];
    const Propagator prop(experiment.system, drives, experiment.medium);
    const auto entry = drives.fields();
    const auto out = prop.exit(entry);
    const auto p = static_cast<std::size_t>(Field::Probe);
    if (entry[p] == Complex{}) {
      throw SimulationError(ErrorKind::UndefinedTransmission, "zero entry probe amplitude");
    }
    const auto rho = prop.solver().solve(out);
    return Point{std::norm(out[p]) / std::norm(entry[p]),
                 std::abs(probe_coherence(experiment.system.scheme(), rho)), rho(2, 2).real(),
                 rho(3, 3).real(), rho(4, 4).real()};
  });

  SweepResult r;
  r.axis_name = "delta2_over_gamma";
  r.axis.assign(delta2_grid.begin(), delta2_grid.end());
  std::vector<double> t2, coh, r22, r33, r44;
  for (const auto& p : points) {
    t2.push_back(p.t2);
    coh.push_back(p.coherence);
    r22.push_back(p.rho22);
    r33.push_back(p.rho33);
    r44.push_back(p.rho44);
  }
  r.columns = {{"T2", std::move(t2)},
               {"probe_coherence_abs_exit", std::move(coh)},
               {"rho22_exit", std::move(r22)},
               {"rho33_exit", std::move(r33)},
               {"rho44_exit", std::move(r44)}};
  return r;
}

SweepResult switching_curve(const Experiment& experiment, std::span<const double> intensity_grid,
                            int threads) {
  check_grid(intensity_grid, "control intensity");
  if (intensity_grid.front() < 0.0) {
    throw SimulationError(ErrorKind::Parameter, "control intensities must be non-negative");
  }
  check_drives(experiment.system, experiment.drives);
  const Propagator prop(experiment.system, experiment.drives, experiment.medium);
  const Complex phase = unit_phase(experiment.drives.control);

  auto t2 = parallel_map(intensity_grid.size(), threads, [&](std::size_t i) {
    DriveSet drives = experiment.drives;
    drives.control = phase * std::sqrt(intensity_grid[i]);
    return exit_transmission(prop, drives.fields(), Field::Probe);
  });

  SweepResult r;
  r.axis_name = "control_intensity_over_gamma2";
  r.axis.assign(intensity_grid.begin(), intensity_grid.end());
  r.columns = {{"T2", std::move(t2)}};
  return r;
}

SweepResult sa_rsa_curve(const Experiment& experiment, std::span<const double> intensity_grid,
                         int threads) {
  if (experiment.system.scheme() != Scheme::Ypsilon4) {
    throw SimulationError(ErrorKind::Parameter, "SA/RSA curves need the Y-type scheme");
  }
  check_grid(intensity_grid, "probe intensity");
  if (!(intensity_grid.front() > 0.0)) {
    throw SimulationError(ErrorKind::Parameter, "probe intensities must be positive");
  }
  check_drives(experiment.system, experiment.drives);
  const Propagator prop(experiment.system, experiment.drives, experiment.medium);
  const Complex phase = unit_phase(experiment.drives.probe);

  const std::size_t n = intensity_grid.size();
  // indices [0, n) are control-off points, [n, 2n) control-on
  auto t = parallel_map(2 * n, threads, [&](std::size_t i) {
    DriveSet drives = experiment.drives;
    drives.probe = phase * std::sqrt(intensity_grid[i % n]);
    if (i < n) drives.control = 0.0;
    return exit_transmission(prop, drives.fields(), Field::Probe);
  });

  SweepResult r;
  r.axis_name = "probe_intensity_over_gamma2";
  r.axis.assign(intensity_grid.begin(), intensity_grid.end());
  r.columns = {{"T_off", std::vector<double>(t.begin(), t.begin() + static_cast<long>(n))},
               {"T_on", std::vector<double>(t.begin() + static_cast<long>(n), t.end())}};
  return r;
}

std::vector<Extremum> spectrum_extrema(const SweepResult& result, std::string_view column) {
  const auto& y = result.column(column);
  const auto& x = result.axis;
  if (y.size() < 3 || x.size() != y.size()) {
    throw SimulationError(ErrorKind::Resolution, "extrema need at least three points");
  }
  std::vector<Extremum> out;
  for (std::size_t k = 1; k + 1 < y.size(); ++k) {
    const bool is_min = y[k] < y[k - 1] && y[k] < y[k + 1];
    const bool is_max = y[k] > y[k - 1] && y[k] > y[k + 1];
    if (!is_min && !is_max) continue;

    const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
    const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    double xv = x1, yv = y1;
    if (a != 0.0 && std::isfinite(a) && std::isfinite(b)) {
      xv = std::clamp(-b / (2.0 * a), x0, x2);
      yv = y1 + a * (xv - x1) * (xv - x1) + (2.0 * a * x1 + b) * (xv - x1);
    }
    out.push_back({xv, yv, is_min ? Extremum::Kind::Min : Extremum::Kind::Max});
  }
  return out;
}

}  // namespace fourlevel
