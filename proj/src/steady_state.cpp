#include "fourlevel/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fourlevel/errors.hpp"

namespace fourlevel {
namespace {

constexpr std::size_t kTraceRow = coords::population(1);  // replaces d(rho11)/dt

void replace_trace_row(kernels::Matrix16& a) {
  for (std::size_t c = 0; c < kernels::kDim; ++c) a(kTraceRow, c) = c < 4 ? 1.0 : 0.0;
}

// NaN-propagating: a non-finite entry yields +inf.
template <class Range>
double max_abs(const Range& values) {
  double m = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) return HUGE_VAL;
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

SteadyStateSolver::SteadyStateSolver(const AtomicSystem& system, const DriveSet& detunings)
    : generator_(system, detunings) {
  if (system.min_nonzero_decay() == 0.0) {
    throw SimulationError(ErrorKind::DegenerateSteadyState,
                          "all decay rates vanish; the stationary state is not unique");
  }
}

kernels::Vector16 SteadyStateSolver::solve_coords(const FieldAmplitudes& fields) const {
  const auto& k = kernels::active_kernels();

  kernels::Matrix16 gen;
  generator_.assemble(fields, gen);
  kernels::Matrix16 a = gen;
  replace_trace_row(a);

  kernels::Vector16 b;
  b[kTraceRow] = 1.0;

  kernels::Vector16 x;
  const double floor = 1e-12 * max_abs(a.data);
  if (!k.solve(a, b, x, floor)) {
    throw SimulationError(ErrorKind::DegenerateSteadyState,
                          "trace-constrained steady-state system is singular");
  }

  kernels::Vector16 r;
  k.matvec(gen, x, r);
  if (max_abs(r.data) >= kSteadyStateResidualTolerance) {
    // one round of iterative refinement on the constrained system
    kernels::Vector16 ax;
    k.matvec(a, x, ax);
    kernels::Vector16 defect;
    for (std::size_t i = 0; i < kernels::kDim; ++i) defect[i] = b[i] - ax[i];
    kernels::Vector16 dx;
    if (k.solve(a, defect, dx, floor)) {
      for (std::size_t i = 0; i < kernels::kDim; ++i) x[i] += dx[i];
    }
    k.matvec(gen, x, r);
    const double res = max_abs(r.data);
    if (!(res < kSteadyStateResidualTolerance)) {
      std::ostringstream os;
      os << "steady-state residual " << res << " above tolerance " << kSteadyStateResidualTolerance;
      throw SimulationError(ErrorKind::Convergence, os.str());
    }
  }
  return x;
}

DensityMatrix SteadyStateSolver::solve(const FieldAmplitudes& fields) const {
  return from_coords(solve_coords(fields));
}

DensityMatrix steady_state(const AtomicSystem& system, const DriveSet& drives) {
  check_drives(system, drives);
  return SteadyStateSolver(system, drives).solve(drives.fields());
}

double generator_residual(const AtomicSystem& system, const DriveSet& drives,
                          const DensityMatrix& rho) {
  const auto image = multiply(liouvillian(system, drives), rho.vec());
  double m = 0.0;
  for (const auto& z : image) m = std::max(m, std::abs(z));
  return m;
}

double max_stable_step(const AtomicSystem& system, const DriveSet& drives) {
  const double scale = std::max({drives.max_amplitude(), dephasing_rates(system).max(), 1.0});
  return 1e-2 / scale;
}

double oracle_horizon(const AtomicSystem& system) {
  const double g = system.min_nonzero_decay();
  if (g == 0.0) {
    throw SimulationError(ErrorKind::DegenerateSteadyState, "no nonzero decay rate");
  }
  return 50.0 / g;
}

DensityMatrix time_evolve(const AtomicSystem& system, const DriveSet& drives,
                          const DensityMatrix& rho0, double t_final, double dt) {
  check_drives(system, drives);
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw SimulationError(ErrorKind::Parameter, "t_final must be finite and non-negative");
  }
  const double limit = max_stable_step(system, drives);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " outside (0, " << limit << "]";
    throw SimulationError(ErrorKind::StepSize, os.str());
  }
  if (t_final == 0.0) return rho0;

  const auto steps = static_cast<long long>(std::ceil(t_final / dt - 1e-9));
  const double h = t_final / static_cast<double>(steps);

  const auto& k = kernels::active_kernels();
  const LinearGenerator generator(system, drives);
  kernels::Matrix16 hl = generator.assemble(drives.fields());
  for (double& v : hl.data) v *= h;

  // P = I + hL (I + hL/2 (I + hL/3 (I + hL/4)))
  kernels::Matrix16 propagator;
  for (std::size_t i = 0; i < kernels::kDim; ++i) propagator(i, i) = 1.0;
  for (int order = 4; order >= 1; --order) {
    kernels::Matrix16 scaled = hl;
    for (double& v : scaled.data) v /= order;
    kernels::Matrix16 next;
    k.matmul(scaled, propagator, next);
    for (std::size_t i = 0; i < kernels::kDim; ++i) next(i, i) += 1.0;
    propagator = next;
  }

  auto trace_of = [](const kernels::Vector16& v) { return v[0] + v[1] + v[2] + v[3]; };

  kernels::Vector16 x = to_coords(rho0);
  const double trace0 = trace_of(x);
  kernels::Vector16 y;
  constexpr long long kCheckEvery = 1 << 16;
  for (long long n = 0; n < steps; ++n) {
    k.matvec(propagator, x, y);
    x = y;
    if ((n + 1) % kCheckEvery == 0) {
      const double drift = std::abs(trace_of(x) - trace0);
      if (!std::isfinite(max_abs(x.data)) || drift > 1e-6) {
        throw SimulationError(ErrorKind::StepSize, "time integration blew up");
      }
    }
  }
  const double drift = std::abs(trace_of(x) - trace0);
  if (!std::isfinite(max_abs(x.data)) || drift >= 1e-9) {
    std::ostringstream os;
    os << "trace drifted by " << drift << " during time integration";
    throw SimulationError(ErrorKind::StepSize, os.str());
  }
  return from_coords(x);
}

Complex probe_coherence(Scheme scheme, const DensityMatrix& rho) {
  return scheme == Scheme::Ladder4 ? rho(3, 2) : rho(2, 1) + rho(3, 2);
}

Complex susceptibility_element(const AtomicSystem& system, const DriveSet& drives) {
  return probe_coherence(system.scheme(), steady_state(system, drives));
}

}  // namespace fourlevel
