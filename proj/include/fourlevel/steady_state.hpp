#pragma once

#include "fourlevel/atom_model.hpp"
#include "fourlevel/kernels.hpp"

namespace fourlevel {

inline constexpr double kSteadyStateResidualTolerance = 1e-10;

/// Stationary solutions for one atomic system at fixed detunings. The
/// generator is pre-split by field, so each solve costs one assembly pass and
/// one dense 16x16 factorisation; instances are immutable and shareable
/// between threads.
class SteadyStateSolver {
 public:
  SteadyStateSolver(const AtomicSystem& system, const DriveSet& detunings);

  /// Hermitian coordinates of the steady state (see atom_model.hpp).
  /// Throws DegenerateSteadyState when the trace-constrained system is
  /// singular and Convergence when the residual exceeds the tolerance.
  kernels::Vector16 solve_coords(const FieldAmplitudes& fields) const;

  DensityMatrix solve(const FieldAmplitudes& fields) const;

  const LinearGenerator& generator() const noexcept { return generator_; }

 private:
  LinearGenerator generator_;
};

DensityMatrix steady_state(const AtomicSystem& system, const DriveSet& drives);

/// Max-norm of L vec(rho) using the complex 16x16 generator.
double generator_residual(const AtomicSystem& system, const DriveSet& drives,
                          const DensityMatrix& rho);

/// Largest dt accepted by time_evolve: 1e-2 / max(|drive|, max Gamma, 1).
double max_stable_step(const AtomicSystem& system, const DriveSet& drives);

/// 50 / (smallest nonzero decay rate); the horizon used by the
/// time-evolution oracle.
double oracle_horizon(const AtomicSystem& system);

/// Classical fourth-order Runge-Kutta on the master equation up to t_final.
/// The generator is constant, so one RK4 step equals the fourth-order Taylor
/// polynomial of dt*L; that matrix is formed once and applied per step.
/// dt is shrunk so an integer number of steps lands exactly on t_final.
DensityMatrix time_evolve(const AtomicSystem& system, const DriveSet& drives,
                          const DensityMatrix& rho0, double t_final, double dt);

/// The coherence that sources the probe equation: rho32 (ladder) or
/// rho21 + rho32 (Y-type).
Complex probe_coherence(Scheme scheme, const DensityMatrix& rho);

Complex susceptibility_element(const AtomicSystem& system, const DriveSet& drives);

}  // namespace fourlevel
