#pragma once

// Gaussian probe pulse through the medium in the quasi-CW picture: every
// spectral component is carried by the steady-state transfer function
// H(w) = G2(L; delta2 + w) / G2(0).

#include <optional>
#include <string>
#include <vector>

#include "fourlevel/propagation.hpp"

namespace fourlevel {

struct PulseSpec {
  double sigma = 0.0;             // spectral width, rad/s (sigma_t = 2 / sigma)
  double peak_rabi = 0.1;         // peak probe amplitude in the time domain, gamma
  double gamma_rad_per_s = 0.0;   // the reference rate gamma, rad/s
  int points = 4096;              // frequency grid size, multiple of 4
  double span_sigmas = 16.0;      // grid covers +-span_sigmas * sigma
  /// H is evaluated where |e(w)| >= spectral_cutoff * max|e|; elsewhere the
  /// output spectrum is taken as zero. 0 evaluates every grid point.
  double spectral_cutoff = 1e-20;

  double sigma_t() const { return 2.0 / sigma; }

  bool operator==(const PulseSpec&) const = default;
};

struct PulseEnvelope {
  std::vector<double> omega;       // rad/s, ascending, zero at index points/2
  std::vector<Complex> spectrum;   // e(w) = e0 / (sigma sqrt(pi)) exp(-w^2 / sigma^2)
  std::vector<double> t;           // s, the discrete dual of omega
  std::vector<Complex> trace;      // e(t) = sum_w e(w) exp(-i w t) dw
  double d_omega = 0.0;
  double dt = 0.0;
};

/// Throws Parameter for sigma <= 0 or gamma <= 0, Resolution when the grid
/// is too small or either representation is not negligible at its edges.
PulseEnvelope gaussian_envelope(const PulseSpec& spec);

/// The time trace of an arbitrary spectrum on the envelope's grid.
std::vector<Complex> time_trace(const PulseEnvelope& grid, const std::vector<Complex>& spectrum);

struct PulseResult {
  PulseEnvelope input;
  std::vector<Complex> output_spectrum;
  std::vector<Complex> output_trace;
  std::vector<Complex> transfer;  // H(w); NaN where not evaluated
  std::size_t evaluated = 0;      // number of grid points with H computed
  Complex h0{};                   // H at the carrier
  double peak_ratio = 0.0;        // max|out|^2 / max|in|^2
  double linearity_change = 0.0;  // relative change of |H(0)| between e0/2 and e0
  std::optional<std::string> regime_warning;
};

/// drives.probe is ignored; the entry probe is spec.peak_rabi (real) and
/// drives.delta2 is the carrier detuning.
PulseResult pulse_transmission(const PulseSpec& spec, const AtomicSystem& system,
                               const DriveSet& drives, const MediumSpec& medium, int threads = 0);

/// Sum |e|^2 dx for each representation; equal by Parseval up to the 2 pi of
/// this transform convention (time energy = 2 pi * spectral energy).
double spectral_energy(const PulseEnvelope& grid, const std::vector<Complex>& spectrum);
double temporal_energy(const PulseEnvelope& grid, const std::vector<Complex>& trace);

}  // namespace fourlevel
