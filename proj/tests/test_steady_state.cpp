#include <random>
#include <vector>

#include "doctest.h"
#include "fourlevel/errors.hpp"
#include "fourlevel/steady_state.hpp"
#include "support.hpp"

using namespace fourlevel;

namespace {

double two_level_excited(double g1, double g12) {
  const double s = 4.0 * g1 * g1 / (g12 * g12);
  return s / (1.0 + 2.0 * s);
}

}  // namespace

TEST_CASE("undriven atoms relax to the ground state") {
  for (const auto& system : {AtomicSystem::ladder(1, 1, 0.01), AtomicSystem::ypsilon(1, 2, 0.5)}) {
    const auto rho = steady_state(system, DriveSet{});
    CHECK(rho.max_abs_diff(Matrix4c::projector(1)) < 1e-12);
  }
}

TEST_CASE("two-level saturation closed form") {
  for (double g1 : {1.0, 10.0}) {
    DriveSet drives;
    drives.coupling = g1;
    const auto rho = steady_state(AtomicSystem::ladder(1.0, 1.0, 0.005 / 9.0), drives);
    CHECK(std::abs(rho(2, 2).real() - two_level_excited(g1, 1.0)) < 1e-10);
  }
  DriveSet drives;
  drives.coupling = 10.0;
  const auto rho = steady_state(AtomicSystem::ladder(1.0, 1.0, 1.0), drives);
  CHECK(rho(2, 2).real() == doctest::Approx(400.0 / 801.0).epsilon(1e-12));
}

TEST_CASE("steady states are physical and stationary") {
  std::mt19937_64 rng(201);
  for (Scheme scheme : {Scheme::Ladder4, Scheme::Ypsilon4}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto system = testing::random_system(rng, scheme, 0.05, 3.0);
      const auto drives = testing::random_drives(rng, scheme, 10.0, 10.0);
      const auto rho = steady_state(system, drives);
      CHECK(generator_residual(system, drives, rho) < kSteadyStateResidualTolerance);
      CHECK(is_density_matrix(rho));
      CHECK(testing::min_eigenvalue(rho) >= -1e-6);
    }
  }
}

TEST_CASE("steady state matches long-time evolution from random initial states") {
  std::mt19937_64 rng(202);
  for (Scheme scheme : {Scheme::Ladder4, Scheme::Ypsilon4}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto system = testing::random_system(rng, scheme, 0.5, 2.0);
      const auto drives = testing::random_drives(rng, scheme, 3.0, 3.0);
      const auto rho_ss = steady_state(system, drives);
      const double t = oracle_horizon(system);
      const double dt = max_stable_step(system, drives);
      const auto a = time_evolve(system, drives, testing::random_density_matrix(rng), t, dt);
      const auto b = time_evolve(system, drives, testing::random_density_matrix(rng), t, dt);
      CHECK(a.max_abs_diff(rho_ss) < 1e-6);
      CHECK(b.max_abs_diff(rho_ss) < 1e-6);
    }
  }
}

TEST_CASE("time evolution examples") {
  const auto system = AtomicSystem::ladder(0.8, 1.0, 0.3);
  SUBCASE("ground state stays put") {
    const auto rho = time_evolve(system, DriveSet{}, Matrix4c::projector(1), 7.3, 1e-2);
    CHECK(rho.max_abs_diff(Matrix4c::projector(1)) < 1e-15);
  }
  SUBCASE("exponential decay of level 2") {
    for (double t : {0.5, 2.0, 5.0}) {
      const auto rho = time_evolve(system, DriveSet{}, Matrix4c::projector(2), t, 1e-2);
      CHECK(rho(2, 2).real() == doctest::Approx(std::exp(-0.8 * t)).epsilon(1e-10));
      CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("oversized step is rejected") {
    DriveSet drives;
    drives.coupling = 10.0;
    try {
      time_evolve(system, drives, Matrix4c::projector(1), 1.0, 0.01);
      FAIL("expected a step-size error");
    } catch (const SimulationError& e) {
      CHECK(e.kind() == ErrorKind::StepSize);
    }
  }
}

TEST_CASE("degenerate systems are rejected") {
  try {
    steady_state(AtomicSystem::ladder(0, 0, 0), DriveSet{});
    FAIL("expected a degenerate-steady-state error");
  } catch (const SimulationError& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSteadyState);
  }
  const SteadyStateSolver solver(AtomicSystem::ladder(1, 1, 1), DriveSet{});
  const double nan = std::nan("");
  CHECK_THROWS_AS(solver.solve({Complex(0), Complex(nan), Complex(0)}), SimulationError);
}

TEST_CASE("susceptibility element") {
  const auto system = AtomicSystem::ladder(1.0, 1.0, 0.005 / 9.0);
  SUBCASE("zero probe gives zero coherence") {
    DriveSet drives;
    drives.coupling = 10.0;
    drives.control = 10.0;
    CHECK(std::abs(susceptibility_element(system, drives)) < 1e-15);
    CHECK(std::abs(susceptibility_element(AtomicSystem::ypsilon(1, 1, 1), DriveSet{})) == 0.0);
  }
  SUBCASE("linear response in the weak-probe limit") {
    for (double g : {0.0, 10.0}) {
      DriveSet drives;
      drives.coupling = 10.0;
      drives.control = g;
      drives.probe = 1e-4;
      const Complex a = susceptibility_element(system, drives) / 1e-4;
      drives.probe = 1e-3;
      const Complex b = susceptibility_element(system, drives) / 1e-3;
      CHECK(std::abs(a - b) / std::abs(a) < 1e-3);
    }
  }
  SUBCASE("absorption doublet at the dressed-state positions") {
    DriveSet drives;
    drives.coupling = 10.0;
    drives.probe = 1.0;
    std::vector<double> grid, absorption;
    for (int k = 0; k <= 600; ++k) {
      drives.delta2 = -30.0 + 0.1 * k;
      grid.push_back(drives.delta2);
      absorption.push_back(std::abs(susceptibility_element(system, drives).imag()));
    }
    for (double target : {-10.0, 10.0}) {
      std::size_t best = 0;
      double best_dist = 1e9;
      for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        if (absorption[k] > absorption[k - 1] && absorption[k] > absorption[k + 1] &&
            std::abs(grid[k] - target) < best_dist) {
          best = k;
          best_dist = std::abs(grid[k] - target);
        }
      }
      CAPTURE(target);
      CHECK(best_dist <= 0.1 + 1e-9);
      CHECK(best > 0);
    }
  }
}

TEST_CASE("detuning mirror symmetry of the probe coherence") {
  const auto system = AtomicSystem::ladder(1.0, 1.0, 0.005 / 9.0);
  DriveSet drives;
  drives.coupling = 10.0;
  drives.control = 7.0;
  drives.probe = 1.0;
  for (double d2 : {0.3, 4.0, 9.7, 21.0}) {
    drives.delta2 = d2;
    const double plus = std::abs(steady_state(system, drives)(3, 2));
    drives.delta2 = -d2;
    const double minus = std::abs(steady_state(system, drives)(3, 2));
    CHECK(std::abs(plus - minus) < 1e-10);
  }
}

TEST_CASE("SIMD and scalar kernels give the same steady state") {
  if (kernels::avx2_kernels() == nullptr) return;
  std::mt19937_64 rng(203);
  const auto original = kernels::active_kernels().isa;
  for (int trial = 0; trial < 20; ++trial) {
    const auto scheme = trial % 2 == 0 ? Scheme::Ladder4 : Scheme::Ypsilon4;
    const auto system = testing::random_system(rng, scheme);
    const auto drives = testing::random_drives(rng, scheme);
    kernels::select_kernels(kernels::Isa::Scalar);
    const auto a = steady_state(system, drives);
    kernels::select_kernels(kernels::Isa::Avx2);
    const auto b = steady_state(system, drives);
    CHECK(a.max_abs_diff(b) < 1e-12);
  }
  kernels::select_kernels(original);
}
