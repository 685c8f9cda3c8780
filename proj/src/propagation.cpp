#include "fourlevel/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fourlevel/errors.hpp"

namespace fourlevel {
namespace {

Complex coherence(const kernels::Vector16& x, int i, int j) {
  const std::size_t k = coords::real_part(i, j);
  return {x[k], x[k + 1]};
}

FieldAmplitudes axpy(const FieldAmplitudes& y, double a, const FieldAmplitudes& x) {
  return {y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]};
}

}  // namespace

const char* to_string(DrivePropagation mode) {
  return mode == DrivePropagation::Propagated ? "propagated" : "undepleted";
}

const char* to_string(ControlSource source) {
  return source == ControlSource::Rho43 ? "rho43" : "rho42";
}

double MediumSpec::coupling_constant(int i, int j) const {
  const auto it = eta.find({i, j});
  return it == eta.end() ? 0.0 : it->second;
}

void check_medium(const MediumSpec& medium, Scheme scheme) {
  if (!(medium.length_cm > 0.0) || !std::isfinite(medium.length_cm)) {
    throw SimulationError(ErrorKind::Parameter, "medium length must be positive");
  }
  if (medium.steps < 100) {
    throw SimulationError(ErrorKind::Parameter, "medium needs at least 100 integration steps");
  }
  const auto allowed = decay_channels(scheme);
  for (const auto& [pair, value] : medium.eta) {
    if (std::find(allowed.begin(), allowed.end(), pair) == allowed.end()) {
      std::ostringstream os;
      os << "eta" << pair.lower << pair.upper << " is not a transition of the " << to_string(scheme)
         << " scheme";
      throw SimulationError(ErrorKind::Parameter, os.str());
    }
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw SimulationError(ErrorKind::Parameter, "coupling constants must be finite and >= 0");
    }
  }
}

Propagator::Propagator(const AtomicSystem& system, const DriveSet& detunings,
                       const MediumSpec& medium)
    : scheme_(system.scheme()), solver_(system, detunings), medium_(medium) {
  check_medium(medium_, scheme_);
  eta12_ = medium_.coupling_constant(1, 2);
  eta23_ = medium_.coupling_constant(2, 3);
  eta_upper_ = scheme_ == Scheme::Ladder4 ? medium_.coupling_constant(3, 4)
                                          : medium_.coupling_constant(2, 4);

  const bool drives_move = medium_.drive_propagation == DrivePropagation::Propagated;
  if (scheme_ == Scheme::Ladder4) {
    vacuum_ = eta23_ == 0.0 && (!drives_move || (eta12_ == 0.0 && eta_upper_ == 0.0));
  } else {
    vacuum_ = eta12_ == 0.0 && eta23_ == 0.0 && (!drives_move || eta_upper_ == 0.0);
  }
}

FieldAmplitudes Propagator::derivative(const FieldAmplitudes& fields) const {
  const auto x = solver_.solve_coords(fields);
  const Complex i{0.0, 1.0};
  const bool drives_move = medium_.drive_propagation == DrivePropagation::Propagated;

  FieldAmplitudes d{};
  if (scheme_ == Scheme::Ladder4) {
    d[static_cast<std::size_t>(Field::Probe)] = i * eta23_ * coherence(x, 3, 2);
    if (drives_move) {
      d[static_cast<std::size_t>(Field::Coupling)] = i * eta12_ * coherence(x, 2, 1);
      d[static_cast<std::size_t>(Field::Control)] = i * eta_upper_ * coherence(x, 4, 3);
    }
  } else {
    d[static_cast<std::size_t>(Field::Probe)] =
        i * (eta12_ * coherence(x, 2, 1) + eta23_ * coherence(x, 3, 2));
    if (drives_move) {
      const Complex source = medium_.ytype_control_source == ControlSource::Rho43
                                 ? coherence(x, 4, 3)
                                 : coherence(x, 4, 2);
      d[static_cast<std::size_t>(Field::Control)] = i * eta_upper_ * source;
    }
  }
  return d;
}

template <class Sink>
FieldAmplitudes Propagator::integrate(const FieldAmplitudes& entry, Sink&& sink) const {
  const int n = medium_.steps;
  const double h = medium_.length_cm / n;
  FieldAmplitudes f = entry;
  sink(0, f);
  if (vacuum_) {
    for (int s = 1; s <= n; ++s) sink(s, f);
    return f;
  }

  double z = 0.0;
  auto stage = [&](const FieldAmplitudes& at, double where) {
    try {
      return derivative(at);
    } catch (const SimulationError& e) {
      std::ostringstream os;
      os << "steady state failed at z = " << where << " cm: " << e.what();
      throw PropagationError(where, os.str());
    }
  };

  for (int s = 1; s <= n; ++s) {
    const auto k1 = stage(f, z);
    const auto k2 = stage(axpy(f, 0.5 * h, k1), z + 0.5 * h);
    const auto k3 = stage(axpy(f, 0.5 * h, k2), z + 0.5 * h);
    const auto k4 = stage(axpy(f, h, k3), z + h);
    for (std::size_t c = 0; c < 3; ++c) {
      f[c] += (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    z = medium_.length_cm * static_cast<double>(s) / n;
    sink(s, f);
  }
  return f;
}

FieldAmplitudes Propagator::exit(const FieldAmplitudes& entry) const {
  return integrate(entry, [](int, const FieldAmplitudes&) {});
}

FieldProfile Propagator::profile(const FieldAmplitudes& entry) const {
  const auto n = static_cast<std::size_t>(medium_.steps) + 1;
  FieldProfile p;
  p.z.resize(n);
  const bool ladder = scheme_ == Scheme::Ladder4;
  for (std::size_t c = 0; c < 3; ++c) {
    if (ladder || c != static_cast<std::size_t>(Field::Coupling)) p.fields[c].resize(n);
  }
  integrate(entry, [&](int s, const FieldAmplitudes& f) {
    const auto idx = static_cast<std::size_t>(s);
    p.z[idx] = medium_.length_cm * static_cast<double>(s) / medium_.steps;
    for (std::size_t c = 0; c < 3; ++c) {
      if (!p.fields[c].empty()) p.fields[c][idx] = f[c];
    }
  });
  return p;
}

FieldProfile propagate(const AtomicSystem& system, const DriveSet& entry, const MediumSpec& medium) {
  check_drives(system, entry);
  return Propagator(system, entry, medium).profile(entry.fields());
}

FieldAmplitudes propagate_exit(const AtomicSystem& system, const DriveSet& entry,
                               const MediumSpec& medium) {
  check_drives(system, entry);
  return Propagator(system, entry, medium).exit(entry.fields());
}

double transmission(const FieldProfile& profile, Field field) {
  const auto& values = profile.field(field);
  if (values.empty()) {
    throw SimulationError(ErrorKind::UndefinedTransmission,
                          std::string("profile carries no ") + to_string(field) + " field");
  }
  const double in = std::norm(values.front());
  if (in == 0.0) {
    throw SimulationError(ErrorKind::UndefinedTransmission,
                          std::string("zero entry amplitude for the ") + to_string(field) + " field");
  }
  return std::norm(values.back()) / in;
}

ConvergedProfile propagate_converged(const AtomicSystem& system, const DriveSet& entry,
                                     MediumSpec medium, double tolerance, int max_doublings) {
  check_drives(system, entry);
  auto previous = Propagator(system, entry, medium).profile(entry.fields());
  for (int attempt = 0; attempt < max_doublings; ++attempt) {
    medium.steps *= 2;
    auto next = Propagator(system, entry, medium).profile(entry.fields());
    double change = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      if (next.fields[c].empty()) continue;
      const Complex a = previous.fields[c].back();
      const Complex b = next.fields[c].back();
      const double scale = std::max(std::abs(b), 1e-300);
      change = std::max(change, std::abs(a - b) / scale);
    }
    if (change < tolerance) return {std::move(next), medium.steps, change};
    previous = std::move(next);
  }
  throw SimulationError(ErrorKind::Accuracy, "step doubling did not converge the exit amplitudes");
}

}  // namespace fourlevel
