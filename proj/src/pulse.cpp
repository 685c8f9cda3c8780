#include "fourlevel/pulse.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "fourlevel/errors.hpp"
#include "fourlevel/parallel.hpp"

namespace fourlevel {
namespace {

constexpr double kEdgeTolerance = 1e-12;

// The FFTW planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// out_n = sum_k in_k exp(-2 pi i k n / N)
std::vector<Complex> forward_dft(const std::vector<Complex>& in) {
  const int n = static_cast<int>(in.size());
  std::vector<Complex> work(in), out(in.size());
  auto* src = reinterpret_cast<fftw_complex*>(work.data());
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, src, dst, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

std::vector<Complex> time_trace(const PulseEnvelope& grid, const std::vector<Complex>& spectrum) {
  // With centred grids w_k = (k - N/2) dw, t_n = (n - N/2) dt and N divisible
  // by 4, exp(-i w_k t_n) = (-1)^k (-1)^n exp(-2 pi i k n / N).
  const std::size_t n = spectrum.size();
  std::vector<Complex> shifted(n);
  for (std::size_t k = 0; k < n; ++k) shifted[k] = (k % 2 == 0 ? 1.0 : -1.0) * spectrum[k];
  auto out = forward_dft(shifted);
  for (std::size_t i = 0; i < n; ++i) out[i] *= (i % 2 == 0 ? 1.0 : -1.0) * grid.d_omega;
  return out;
}

PulseEnvelope gaussian_envelope(const PulseSpec& spec) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) {
    throw SimulationError(ErrorKind::Parameter, "pulse width sigma must be positive");
  }
  if (!(spec.gamma_rad_per_s > 0.0)) {
    throw SimulationError(ErrorKind::Parameter, "reference gamma must be positive");
  }
  if (spec.points < 4096 || spec.points % 4 != 0) {
    throw SimulationError(ErrorKind::Resolution,
                          "pulse grid needs at least 4096 points, a multiple of 4");
  }
  if (!(spec.span_sigmas >= 6.0)) {
    throw SimulationError(ErrorKind::Resolution, "pulse grid must span at least +-6 sigma");
  }

  const auto n = static_cast<std::size_t>(spec.points);
  PulseEnvelope env;
  env.d_omega = 2.0 * spec.span_sigmas * spec.sigma / static_cast<double>(n);
  env.dt = 2.0 * std::numbers::pi / (static_cast<double>(n) * env.d_omega);
  env.omega.resize(n);
  env.t.resize(n);
  env.spectrum.resize(n);
  const double norm = spec.peak_rabi / (spec.sigma * std::sqrt(std::numbers::pi));
  for (std::size_t k = 0; k < n; ++k) {
    const double offset = static_cast<double>(k) - static_cast<double>(n / 2);
    env.omega[k] = offset * env.d_omega;
    env.t[k] = offset * env.dt;
    const double w = env.omega[k] / spec.sigma;
    env.spectrum[k] = norm * std::exp(-w * w);
  }
  env.trace = time_trace(env, env.spectrum);

  const double spec_peak = max_abs(env.spectrum);
  const double trace_peak = max_abs(env.trace);
  const double spec_edge = std::abs(env.spectrum.front());
  const double trace_edge = std::max(std::abs(env.trace.front()), std::abs(env.trace[1]));
  if (spec_edge > kEdgeTolerance * spec_peak || trace_edge > kEdgeTolerance * trace_peak) {
    throw SimulationError(ErrorKind::Resolution,
                          "pulse grid too coarse: the envelope does not vanish at the grid edge");
  }
  return env;
}

double spectral_energy(const PulseEnvelope& grid, const std::vector<Complex>& spectrum) {
  double s = 0.0;
  for (const auto& z : spectrum) s += std::norm(z);
  return s * grid.d_omega;
}

double temporal_energy(const PulseEnvelope& grid, const std::vector<Complex>& trace) {
  double s = 0.0;
  for (const auto& z : trace) s += std::norm(z);
  return s * grid.dt;
}

PulseResult pulse_transmission(const PulseSpec& spec, const AtomicSystem& system,
                               const DriveSet& drives, const MediumSpec& medium, int threads) {
  PulseResult r;
  r.input = gaussian_envelope(spec);
  if (!(spec.peak_rabi > 0.0)) {
    throw SimulationError(ErrorKind::Parameter, "peak probe amplitude must be positive");
  }
  DriveSet carrier = drives;
  carrier.probe = spec.peak_rabi;
  check_drives(system, carrier);
  check_medium(medium, system.scheme());

  const std::size_t n = r.input.omega.size();
  const double threshold = spec.spectral_cutoff * max_abs(r.input.spectrum);
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(r.input.spectrum[k]) >= threshold) active.push_back(k);
  }

  auto transfer_at = [&](double delta2, double amplitude) {
    DriveSet d = carrier;
    d.delta2 = delta2;
    d.probe = amplitude;
    const Propagator prop(system, d, medium);
    const auto out = prop.exit(d.fields());
    return out[static_cast<std::size_t>(Field::Probe)] / Complex(amplitude);
  };

  const auto values = parallel_map(active.size(), threads, [&](std::size_t i) {
    const double w = r.input.omega[active[i]] / spec.gamma_rad_per_s;
    return transfer_at(carrier.delta2 + w, spec.peak_rabi);
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.transfer.assign(n, Complex(nan, nan));
  r.output_spectrum.assign(n, Complex{});
  for (std::size_t i = 0; i < active.size(); ++i) {
    const std::size_t k = active[i];
    r.transfer[k] = values[i];
    r.output_spectrum[k] = values[i] * r.input.spectrum[k];
  }
  r.evaluated = active.size();
  r.output_trace = time_trace(r.input, r.output_spectrum);

  r.h0 = r.transfer[n / 2];
  double in_peak = 0.0, out_peak = 0.0;
  for (const auto& z : r.input.trace) in_peak = std::max(in_peak, std::norm(z));
  for (const auto& z : r.output_trace) out_peak = std::max(out_peak, std::norm(z));
  r.peak_ratio = out_peak / in_peak;

  const Complex h_half = transfer_at(carrier.delta2, 0.5 * spec.peak_rabi);
  r.linearity_change = std::abs(std::abs(r.h0) - std::abs(h_half)) / std::abs(h_half);
  if (!(r.linearity_change < 1e-2)) {
    std::ostringstream os;
    os << "pulse outside the linear regime: |H(0)| changes by " << r.linearity_change
       << " between peak amplitudes " << 0.5 * spec.peak_rabi << " and " << spec.peak_rabi;
    r.regime_warning = os.str();
  }
  return r;
}

}  // namespace fourlevel
