#pragma once

// Unidirectional ring cavity around the medium, steady state only. The curve
// is traced by the circulating probe amplitude x at the medium entry, so every
// point is a single forward propagation and multivalued branches come out
// directly.

#include <optional>
#include <span>
#include <vector>

#include "fourlevel/propagation.hpp"

namespace fourlevel {

struct CavitySpec {
  double R = 0.96;
  double T = 0.04;
  double delta0 = 0.0;  // cavity phase, rad
  double C = 400.0;

  bool operator==(const CavitySpec&) const = default;
};

/// Throws InconsistentParameters unless T in (0, 1], R in [0, 1) and
/// R + T = 1 within 1e-12.
void check_cavity(const CavitySpec& cavity);

/// With alpha = 2 eta23 / gamma23, C = alpha L / 2T gives T = eta23 L / (C gamma23).
CavitySpec cooperation_to_mirror(double C, const MediumSpec& medium, double gamma23,
                                 double delta0 = 0.0);

struct BistabilityCurve {
  std::vector<double> x;       // circulating entry amplitude, gamma
  std::vector<double> input;   // |G2_in|^2, gamma^2
  std::vector<double> output;  // |G2_out|^2, gamma^2
};

struct CavityPoint {
  Complex input;
  Complex output;
};

/// Input and output amplitudes for one circulating entry amplitude x. The
/// coupling and control take their entry values on every pass.
class CavityResponse {
 public:
  CavityResponse(const AtomicSystem& system, const DriveSet& drives, const CavitySpec& cavity,
                 const MediumSpec& medium);

  CavityPoint at(double x) const;
  /// Exit probe amplitude G2(L) for entry amplitude x (complex entry allowed).
  Complex exit_probe(Complex x) const;

  const CavitySpec& cavity() const noexcept { return cavity_; }

 private:
  DriveSet drives_;
  CavitySpec cavity_;
  Propagator propagator_;
};

/// 400 log-spaced amplitudes over [1e-3, 1e2] gamma.
std::vector<double> default_cavity_grid();

/// Evaluates the grid (in parallel), then refines each turning point of
/// input(x) by golden-section search until the extremal input is known to
/// 1e-3 relative; refined samples are merged into the curve in x order.
BistabilityCurve cavity_sweep(const AtomicSystem& system, const DriveSet& drives,
                              const CavitySpec& cavity, const MediumSpec& medium,
                              std::span<const double> x_grid, int threads = 0, bool refine = true);

struct Thresholds {
  double lower = 0.0;  // input at the first local minimum of input(x)
  double upper = 0.0;  // input at the first local maximum of input(x)
};

/// Empty when input(x) has no turning point. Throws Resolution for fewer
/// than five points.
std::optional<Thresholds> bistability_thresholds(const BistabilityCurve& curve);

}  // namespace fourlevel
