#pragma once

// Steady-state field propagation through the atomic medium. At every
// integration stage the atomic coherences are the stationary values for the
// local field amplitudes.

#include <map>
#include <vector>

#include "fourlevel/atom_model.hpp"
#include "fourlevel/steady_state.hpp"

namespace fourlevel {

/// Whether the coupling/control fields obey their own propagation equations
/// or keep their entry values along z (undepleted drives).
enum class DrivePropagation { Propagated, Undepleted };

/// Coherence sourcing the Y-type control equation.
enum class ControlSource { Rho43, Rho42 };

const char* to_string(DrivePropagation mode);
const char* to_string(ControlSource source);

struct MediumSpec {
  double length_cm = 1.0;
  /// Coupling constants eta_ij in gamma/cm; absent pairs are zero.
  std::map<LevelPair, double> eta;
  int steps = 2000;
  DrivePropagation drive_propagation = DrivePropagation::Propagated;
  ControlSource ytype_control_source = ControlSource::Rho43;

  double coupling_constant(int i, int j) const;

  bool operator==(const MediumSpec&) const = default;
};

/// Throws SimulationError(Parameter) unless L > 0, steps >= 100, every eta is
/// finite and non-negative and names a transition of the scheme.
void check_medium(const MediumSpec& medium, Scheme scheme);

struct FieldProfile {
  std::vector<double> z;                         // cm, 0 .. L
  std::array<std::vector<Complex>, 3> fields;    // by Field, empty if not in the scheme

  const std::vector<Complex>& field(Field f) const { return fields[static_cast<std::size_t>(f)]; }
};

/// Fixed-step classical RK4 in z over medium.steps steps.
FieldProfile propagate(const AtomicSystem& system, const DriveSet& entry, const MediumSpec& medium);

/// Same integration, returning only the exit amplitudes (indexed by Field).
FieldAmplitudes propagate_exit(const AtomicSystem& system, const DriveSet& entry,
                               const MediumSpec& medium);

/// |X(L)|^2 / |X(0)|^2. Throws UndefinedTransmission on a zero entry amplitude
/// or a field the scheme does not carry.
double transmission(const FieldProfile& profile, Field field);

struct ConvergedProfile {
  FieldProfile profile;
  int steps = 0;
  double relative_change = 0.0;  // between the last two step counts
};

/// Doubles the step count until every exit amplitude moves by less than
/// tolerance (relative). Throws Accuracy after max_doublings.
ConvergedProfile propagate_converged(const AtomicSystem& system, const DriveSet& entry,
                                     MediumSpec medium, double tolerance = 1e-6,
                                     int max_doublings = 4);

/// Integrator reusable across many entry conditions with the same system,
/// detunings and medium (one generator split, no per-call setup).
class Propagator {
 public:
  Propagator(const AtomicSystem& system, const DriveSet& detunings, const MediumSpec& medium);

  /// d(fields)/dz at the given local amplitudes.
  FieldAmplitudes derivative(const FieldAmplitudes& fields) const;

  FieldAmplitudes exit(const FieldAmplitudes& entry) const;
  FieldProfile profile(const FieldAmplitudes& entry) const;

  const SteadyStateSolver& solver() const noexcept { return solver_; }

 private:
  template <class Sink>
  FieldAmplitudes integrate(const FieldAmplitudes& entry, Sink&& sink) const;

  Scheme scheme_;
  SteadyStateSolver solver_;
  MediumSpec medium_;
  double eta12_ = 0.0;
  double eta23_ = 0.0;
  double eta_upper_ = 0.0;  // eta34 (ladder) or eta24 (Y-type)
  bool vacuum_ = false;
};

}  // namespace fourlevel
