#include "fourlevel/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fourlevel/errors.hpp"
#include "fourlevel/experiments.hpp"
#include "fourlevel/parallel.hpp"

namespace fourlevel {
namespace {

constexpr std::size_t kProbe = static_cast<std::size_t>(Field::Probe);

// Indices k of strict interior local extrema of v.
std::vector<std::size_t> turning_points(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    const bool peak = v[k] > v[k - 1] && v[k] >= v[k + 1];
    const bool dip = v[k] < v[k - 1] && v[k] <= v[k + 1];
    if (peak || dip) out.push_back(k);
  }
  return out;
}

}  // namespace

void check_cavity(const CavitySpec& c) {
  if (!(c.T > 0.0 && c.T <= 1.0) || !(c.R >= 0.0 && c.R < 1.0) ||
      std::abs(c.R + c.T - 1.0) > 1e-12 || !std::isfinite(c.delta0)) {
    std::ostringstream os;
    os << "cavity mirrors need T in (0,1], R in [0,1) and R + T = 1 (got R = " << c.R
       << ", T = " << c.T << ")";
    throw SimulationError(ErrorKind::InconsistentParameters, os.str());
  }
}

CavitySpec cooperation_to_mirror(double C, const MediumSpec& medium, double gamma23, double delta0) {
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw SimulationError(ErrorKind::Parameter, "cooperation parameter must be positive");
  }
  if (!(gamma23 > 0.0)) {
    throw SimulationError(ErrorKind::InconsistentParameters, "gamma23 must be positive");
  }
  const double t = medium.coupling_constant(2, 3) * medium.length_cm / (C * gamma23);
  if (!(t > 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "C = " << C << " implies mirror transmittance " << t << " outside (0, 1]";
    throw SimulationError(ErrorKind::InconsistentParameters, os.str());
  }
  CavitySpec c{1.0 - t, t, delta0, C};
  return c;
}

CavityResponse::CavityResponse(const AtomicSystem& system, const DriveSet& drives,
                               const CavitySpec& cavity, const MediumSpec& medium)
    : drives_(drives), cavity_(cavity), propagator_(system, drives, medium) {
  check_cavity(cavity_);
  if (system.scheme() != Scheme::Ladder4) {
    throw SimulationError(ErrorKind::Parameter, "the cavity model uses the ladder scheme");
  }
  check_drives(system, drives);
}

Complex CavityResponse::exit_probe(Complex x) const {
  auto entry = drives_.fields();
  entry[kProbe] = x;
  return propagator_.exit(entry)[kProbe];
}

CavityPoint CavityResponse::at(double x) const {
  const Complex out = exit_probe(x);
  const double sqrt_t = std::sqrt(cavity_.T);
  const Complex feedback = cavity_.R * std::polar(1.0, -cavity_.delta0) * out;
  return {(x - feedback) / sqrt_t, sqrt_t * out};
}

std::vector<double> default_cavity_grid() { return logspace(1e-3, 1e2, 400); }

BistabilityCurve cavity_sweep(const AtomicSystem& system, const DriveSet& drives,
                              const CavitySpec& cavity, const MediumSpec& medium,
                              std::span<const double> x_grid, int threads, bool refine) {
  for (std::size_t k = 0; k < x_grid.size(); ++k) {
    if (!(x_grid[k] > 0.0) || (k > 0 && !(x_grid[k] > x_grid[k - 1]))) {
      throw SimulationError(ErrorKind::Parameter, "x grid must be positive and strictly increasing");
    }
  }
  const CavityResponse response(system, drives, cavity, medium);
  const auto points = parallel_map(x_grid.size(), threads,
                                   [&](std::size_t i) { return response.at(x_grid[i]); });

  BistabilityCurve curve;
  curve.x.assign(x_grid.begin(), x_grid.end());
  for (const auto& p : points) {
    curve.input.push_back(std::norm(p.input));
    curve.output.push_back(std::norm(p.output));
  }
  if (!refine || curve.x.size() < 3) return curve;

  std::vector<double> extra_x, extra_in, extra_out;
  for (std::size_t k : turning_points(curve.input)) {
    const bool peak = curve.input[k] > curve.input[k - 1];
    // golden-section search for the extremum of input(x) on [x_{k-1}, x_{k+1}]
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = curve.x[k - 1], b = curve.x[k + 1];
    auto score = [&](double x) {
      const auto p = response.at(x);
      extra_x.push_back(x);
      extra_in.push_back(std::norm(p.input));
      extra_out.push_back(std::norm(p.output));
      return peak ? -extra_in.back() : extra_in.back();
    };
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = score(c), fd = score(d);
    // the extremum is quadratic in x, so a 1e-4 bracket fixes its value far
    // below 1e-3 relative
    while (b - a > 1e-4 * b) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = score(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = score(d);
      }
    }
  }

  // merge refined samples in x order, dropping duplicates
  std::vector<std::size_t> order(curve.x.size() + extra_x.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n = curve.x.size();
  auto x_of = [&](std::size_t i) { return i < n ? curve.x[i] : extra_x[i - n]; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return x_of(l) < x_of(r); });
  BistabilityCurve merged;
  for (std::size_t i : order) {
    const double x = x_of(i);
    if (!merged.x.empty() && !(x > merged.x.back())) continue;
    merged.x.push_back(x);
    merged.input.push_back(i < n ? curve.input[i] : extra_in[i - n]);
    merged.output.push_back(i < n ? curve.output[i] : extra_out[i - n]);
  }
  return merged;
}

std::optional<Thresholds> bistability_thresholds(const BistabilityCurve& curve) {
  if (curve.x.size() < 5) {
    throw SimulationError(ErrorKind::Resolution, "threshold extraction needs at least five points");
  }
  const auto& in = curve.input;
  for (std::size_t k : turning_points(in)) {
    if (!(in[k] > in[k - 1])) continue;  // first local maximum
    Thresholds t;
    t.upper = in[k];
    t.lower = in[k];
    for (std::size_t j = k + 1; j < in.size(); ++j) {
      t.lower = std::min(t.lower, in[j]);
      if (j + 1 < in.size() && in[j] < in[j - 1] && in[j] <= in[j + 1]) break;
    }
    return t;
  }
  return std::nullopt;
}

}  // namespace fourlevel
