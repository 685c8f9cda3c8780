#include "doctest.h"
#include "fourlevel/cavity.hpp"
#include "fourlevel/errors.hpp"
#include "fourlevel/experiments.hpp"

using namespace fourlevel;

namespace {

AtomicSystem sodium() { return AtomicSystem::ladder(1.0, 1.0, 0.005 / 9.0); }

MediumSpec medium(double eta23 = 16.0, int steps = 400) {
  MediumSpec m;
  m.eta = {{{1, 2}, 12.0}, {{2, 3}, eta23}, {{3, 4}, 0.2}};
  m.steps = steps;
  m.drive_propagation = DrivePropagation::Undepleted;
  return m;
}

DriveSet drives(double g1, double g) {
  DriveSet d;
  d.coupling = g1;
  d.control = g;
  return d;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const SimulationError& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Parameter;
}

// Self-consistent circulating amplitude for a given input amplitude, by
// damped fixed-point iteration of x = sqrt(T) in + R e^{-i delta0} G2(L; x).
Complex solve_ring(const CavityResponse& r, Complex input, Complex x0) {
  const auto& c = r.cavity();
  Complex x = x0;
  for (int it = 0; it < 20000; ++it) {
    const Complex next = std::sqrt(c.T) * input + c.R * std::polar(1.0, -c.delta0) * r.exit_probe(x);
    const Complex updated = 0.5 * x + 0.5 * next;
    if (std::abs(updated - x) <= 1e-13 * std::max(1.0, std::abs(x))) return updated;
    x = updated;
  }
  FAIL("fixed point iteration did not converge");
  return x;
}

}  // namespace

TEST_CASE("cooperation parameter fixes the mirror transmittance") {
  const auto m = medium();
  const auto c = cooperation_to_mirror(400.0, m, 1.0);
  CHECK(c.T == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(c.R == doctest::Approx(0.96).epsilon(1e-14));
  CHECK(c.C == 400.0);
  CHECK(cooperation_to_mirror(16.0, m, 1.0).T == doctest::Approx(1.0));
  CHECK(cooperation_to_mirror(32.0, m, 1.0).T == doctest::Approx(0.5));
  // alpha = 2 eta / gamma makes C = alpha L / 2T the same relation
  const double alpha = 2.0 * 16.0 / 1.0;
  CHECK(alpha * 1.0 / (2.0 * c.T) == doctest::Approx(400.0));

  CHECK(kind_of([&] { cooperation_to_mirror(8.0, m, 1.0); }) == ErrorKind::InconsistentParameters);
  CHECK(kind_of([&] { cooperation_to_mirror(0.0, m, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { cooperation_to_mirror(10.0, MediumSpec{}, 1.0); }) ==
        ErrorKind::InconsistentParameters);
  CHECK(kind_of([&] { check_cavity({0.5, 0.6, 0.0, 1.0}); }) == ErrorKind::InconsistentParameters);
}

TEST_CASE("empty resonant ring is transparent") {
  const CavitySpec c{0.7, 0.3, 0.0, 1.0};
  const CavityResponse r(sodium(), drives(10, 0), c, MediumSpec{});
  for (double x : default_cavity_grid()) {
    const auto p = r.at(x);
    CHECK(std::abs(std::abs(p.output) - std::abs(p.input)) <= 1e-12 * std::max(1.0, std::abs(p.input)));
  }
}

TEST_CASE("weak cooperation gives a single-valued response") {
  const auto m = medium(0.5);
  const auto c = cooperation_to_mirror(1.0, m, 1.0);
  const auto curve = cavity_sweep(sodium(), drives(5, 0), c, m, default_cavity_grid());
  for (std::size_t k = 1; k < curve.input.size(); ++k) CHECK(curve.input[k] > curve.input[k - 1]);
  CHECK_FALSE(bistability_thresholds(curve).has_value());
}

TEST_CASE("strong cooperation gives an S-curve") {
  const auto m = medium();
  const auto c = cooperation_to_mirror(400.0, m, 1.0);
  const auto grid = default_cavity_grid();
  // subcases re-enter the test case; sweep once
  static const auto curve = cavity_sweep(sodium(), drives(5, 0), c, m, grid);
  CHECK(curve.x.size() > grid.size());
  for (std::size_t k = 1; k < curve.x.size(); ++k) CHECK(curve.x[k] > curve.x[k - 1]);
  const auto t = bistability_thresholds(curve);
  REQUIRE(t.has_value());
  CHECK(t->upper > t->lower);

  SUBCASE("lower branch never gains") {
    std::size_t k = 1;
    while (k < curve.input.size() && curve.input[k] > curve.input[k - 1]) {
      CHECK(curve.output[k] <= curve.input[k] + 1e-6);
      ++k;
    }
  }

  SUBCASE("stable branches solve the ring boundary condition") {
    const CavityResponse r(sodium(), drives(5, 0), c, m);
    std::size_t first_turn = 0;
    for (std::size_t k = 1; k < curve.input.size(); ++k) {
      if (curve.input[k] < curve.input[k - 1]) {
        first_turn = k - 1;
        break;
      }
    }
    REQUIRE(first_turn > 10);
    std::vector<std::size_t> samples = {first_turn / 5, first_turn / 2, 4 * first_turn / 5,
                                        curve.x.size() - 40, curve.x.size() - 5};
    for (std::size_t k : samples) {
      const auto p = r.at(curve.x[k]);
      const Complex x = solve_ring(r, p.input, curve.x[k] * 1.01);
      CAPTURE(k);
      CHECK(std::abs(x - curve.x[k]) <= 1e-6 * curve.x[k]);
      const Complex out = std::sqrt(c.T) * r.exit_probe(x);
      CHECK(std::abs(std::norm(out) - curve.output[k]) <= 1e-6 * curve.output[k]);
    }
  }
}

TEST_CASE("threshold extraction") {
  BistabilityCurve monotone{{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}};
  CHECK_FALSE(bistability_thresholds(monotone).has_value());

  BistabilityCurve s{{1, 2, 3, 4, 5, 6, 7}, {1, 3, 4, 2, 1.5, 5, 9}, {0, 0, 0, 0, 0, 0, 0}};
  const auto t = bistability_thresholds(s);
  REQUIRE(t.has_value());
  CHECK(t->upper == 4.0);
  CHECK(t->lower == 1.5);

  BistabilityCurve tiny{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  CHECK(kind_of([&] { bistability_thresholds(tiny); }) == ErrorKind::Resolution);
}
