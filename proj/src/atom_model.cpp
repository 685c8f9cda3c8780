#include "fourlevel/atom_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fourlevel/errors.hpp"

namespace fourlevel {
namespace {

constexpr std::array<LevelPair, 3> kLadderChannels{{{1, 2}, {2, 3}, {3, 4}}};
constexpr std::array<LevelPair, 3> kYpsilonChannels{{{1, 2}, {2, 3}, {2, 4}}};

struct Transition {
  int lower;
  int upper;
  Field field;
};

constexpr std::array<Transition, 3> kLadderTransitions{
    {{1, 2, Field::Coupling}, {2, 3, Field::Probe}, {3, 4, Field::Control}}};
constexpr std::array<Transition, 3> kYpsilonTransitions{
    {{1, 2, Field::Probe}, {2, 3, Field::Probe}, {2, 4, Field::Control}}};

std::span<const Transition> transitions(Scheme scheme) {
  return scheme == Scheme::Ladder4 ? std::span<const Transition>(kLadderTransitions)
                                   : std::span<const Transition>(kYpsilonTransitions);
}

// Generator evaluated with precomputed Hamiltonian and dephasing table.
Matrix4c apply_generator(const AtomicSystem& system, const DephasingRates& dephasing,
                         const Matrix4c& h, const Matrix4c& rho) {
  Matrix4c out;
  const Complex minus_i{0.0, -1.0};
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      Complex comm{};
      for (int k = 1; k <= 4; ++k) comm += h(i, k) * rho(k, j) - rho(i, k) * h(k, j);
      out(i, j) = minus_i * comm;
    }
  }
  for (const auto& [pair, rate] : system.decays()) {
    out(pair.lower, pair.lower) += rate * rho(pair.upper, pair.upper);
    out(pair.upper, pair.upper) -= rate * rho(pair.upper, pair.upper);
  }
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      if (i != j) out(i, j) -= dephasing(i, j) * rho(i, j);
    }
  }
  return out;
}

Matrix4c coordinate_basis(std::size_t k) {
  Matrix4c b;
  if (k < 4) {
    const int level = static_cast<int>(k) + 1;
    b(level, level) = 1.0;
    return b;
  }
  static constexpr std::array<std::pair<int, int>, 6> kPairs{
      {{2, 1}, {3, 1}, {4, 1}, {3, 2}, {4, 2}, {4, 3}}};
  const auto [i, j] = kPairs[(k - 4) / 2];
  if ((k - 4) % 2 == 0) {
    b(i, j) = 1.0;
    b(j, i) = 1.0;
  } else {
    b(i, j) = Complex{0.0, 1.0};
    b(j, i) = Complex{0.0, -1.0};
  }
  return b;
}

void check_rate(double rate, const char* what) {
  if (!std::isfinite(rate) || rate < 0.0) {
    std::ostringstream os;
    os << "negative or non-finite " << what << ": " << rate;
    throw SimulationError(ErrorKind::Parameter, os.str());
  }
}

}  // namespace

const char* to_string(Scheme scheme) {
  return scheme == Scheme::Ladder4 ? "ladder" : "ypsilon";
}

const char* to_string(Field field) {
  switch (field) {
    case Field::Coupling: return "coupling";
    case Field::Probe: return "probe";
    case Field::Control: return "control";
  }
  return "?";
}

std::span<const LevelPair> decay_channels(Scheme scheme) {
  return scheme == Scheme::Ladder4 ? std::span<const LevelPair>(kLadderChannels)
                                   : std::span<const LevelPair>(kYpsilonChannels);
}

AtomicSystem::AtomicSystem(Scheme scheme, std::map<LevelPair, double> decays, double gamma_coll)
    : scheme_(scheme), decays_(std::move(decays)), gamma_coll_(gamma_coll) {
  const auto allowed = decay_channels(scheme);
  if (decays_.size() != allowed.size() ||
      !std::all_of(allowed.begin(), allowed.end(),
                   [&](const LevelPair& p) { return decays_.contains(p); })) {
    throw SimulationError(ErrorKind::Parameter,
                          std::string("decay channels do not match the ") + to_string(scheme) +
                              " scheme");
  }
  for (const auto& [pair, rate] : decays_) check_rate(rate, "decay rate");
  check_rate(gamma_coll_, "collisional rate");
}

AtomicSystem AtomicSystem::ladder(double g12, double g23, double g34, double gamma_coll) {
  return AtomicSystem(Scheme::Ladder4, {{{1, 2}, g12}, {{2, 3}, g23}, {{3, 4}, g34}}, gamma_coll);
}

AtomicSystem AtomicSystem::ypsilon(double g12, double g23, double g24, double gamma_coll) {
  return AtomicSystem(Scheme::Ypsilon4, {{{1, 2}, g12}, {{2, 3}, g23}, {{2, 4}, g24}}, gamma_coll);
}

double AtomicSystem::decay(int lower, int upper) const {
  const auto it = decays_.find({lower, upper});
  return it == decays_.end() ? 0.0 : it->second;
}

double AtomicSystem::decay_out_of(int level) const {
  double sum = 0.0;
  for (const auto& [pair, rate] : decays_) {
    if (pair.upper == level) sum += rate;
  }
  return sum;
}

double AtomicSystem::min_nonzero_decay() const {
  double best = 0.0;
  for (const auto& [pair, rate] : decays_) {
    if (rate > 0.0 && (best == 0.0 || rate < best)) best = rate;
  }
  return best;
}

double DephasingRates::max() const { return *std::max_element(rates_.begin(), rates_.end()); }

DephasingRates dephasing_rates(const AtomicSystem& system) {
  DephasingRates out;
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      if (i == j) continue;
      out.rates_[DephasingRates::index(i, j)] =
          0.5 * (system.decay_out_of(i) + system.decay_out_of(j)) + system.gamma_coll();
    }
  }
  return out;
}

Complex& DriveSet::field(Field f) {
  switch (f) {
    case Field::Coupling: return coupling;
    case Field::Probe: return probe;
    case Field::Control: return control;
  }
  return probe;
}

Complex DriveSet::field(Field f) const { return const_cast<DriveSet*>(this)->field(f); }

double DriveSet::max_amplitude() const {
  return std::max({std::abs(coupling), std::abs(probe), std::abs(control)});
}

void check_drives(const AtomicSystem& system, const DriveSet& drives) {
  for (const Complex c : drives.fields()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw SimulationError(ErrorKind::Parameter, "non-finite drive amplitude");
    }
  }
  if (!std::isfinite(drives.delta1) || !std::isfinite(drives.delta2) ||
      !std::isfinite(drives.delta)) {
    throw SimulationError(ErrorKind::Parameter, "non-finite detuning");
  }
  if (system.scheme() == Scheme::Ypsilon4 && drives.coupling != Complex{}) {
    throw SimulationError(ErrorKind::Parameter,
                          "Y-type scheme has no separate coupling field; the probe drives 1-2 and 2-3");
  }
}

Complex Matrix4c::trace() const { return e_[0] + e_[5] + e_[10] + e_[15]; }

Matrix4c Matrix4c::adjoint() const {
  Matrix4c out;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) out(i, j) = std::conj((*this)(j, i));
  return out;
}

double Matrix4c::max_abs_diff(const Matrix4c& other) const {
  double m = 0.0;
  for (std::size_t k = 0; k < 16; ++k) m = std::max(m, std::abs(e_[k] - other.e_[k]));
  return m;
}

double Matrix4c::max_abs() const {
  double m = 0.0;
  for (const auto& z : e_) m = std::max(m, std::abs(z));
  return m;
}

Matrix4c Matrix4c::projector(int level) {
  Matrix4c p;
  p(level, level) = 1.0;
  return p;
}

PhysicalityReport physicality(const DensityMatrix& rho) {
  PhysicalityReport r;
  r.hermiticity_error = rho.max_abs_diff(rho.adjoint());
  r.trace_error = std::abs(rho.trace() - 1.0);
  r.min_population = rho(1, 1).real();
  r.max_population = rho(1, 1).real();
  for (int i = 2; i <= 4; ++i) {
    r.min_population = std::min(r.min_population, rho(i, i).real());
    r.max_population = std::max(r.max_population, rho(i, i).real());
  }
  return r;
}

bool is_density_matrix(const DensityMatrix& rho) {
  const auto r = physicality(rho);
  return r.hermiticity_error <= 1e-12 && r.trace_error <= 1e-12 && r.min_population >= -1e-8 &&
         r.max_population <= 1.0 + 1e-8;
}

Matrix4c rotating_frame_hamiltonian(const AtomicSystem& system, const DriveSet& drives) {
  Matrix4c h;
  h(2, 2) = -drives.delta1;
  h(3, 3) = -(drives.delta1 + drives.delta2);
  h(4, 4) = system.scheme() == Scheme::Ladder4 ? -(drives.delta1 + drives.delta2 + drives.delta)
                                               : -(drives.delta1 + drives.delta);
  for (const Transition& t : transitions(system.scheme())) {
    const Complex a = drives.field(t.field);
    h(t.upper, t.lower) -= a;
    h(t.lower, t.upper) -= std::conj(a);
  }
  return h;
}

Matrix4c rhs(const AtomicSystem& system, const DriveSet& drives, const Matrix4c& rho) {
  return apply_generator(system, dephasing_rates(system), rotating_frame_hamiltonian(system, drives),
                         rho);
}

ComplexMatrix16 liouvillian(const AtomicSystem& system, const DriveSet& drives) {
  const auto dephasing = dephasing_rates(system);
  const auto h = rotating_frame_hamiltonian(system, drives);
  ComplexMatrix16 l;
  for (std::size_t col = 0; col < 16; ++col) {
    Matrix4c unit;
    unit.vec()[col] = 1.0;
    const auto image = apply_generator(system, dephasing, h, unit);
    for (std::size_t row = 0; row < 16; ++row) l(row, col) = image.vec()[row];
  }
  return l;
}

std::array<Complex, 16> multiply(const ComplexMatrix16& m, const std::array<Complex, 16>& v) {
  std::array<Complex, 16> out{};
  for (std::size_t r = 0; r < 16; ++r) {
    Complex acc{};
    for (std::size_t c = 0; c < 16; ++c) acc += m(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

std::size_t coords::real_part(int i, int j) {
  // slot order (2,1) (3,1) (4,1) (3,2) (4,2) (4,3)
  std::size_t slot = 0;
  if (j == 1) {
    slot = static_cast<std::size_t>(i - 2);
  } else if (j == 2) {
    slot = static_cast<std::size_t>(i);  // (3,2) -> 3, (4,2) -> 4
  } else {
    slot = 5;
  }
  return 4 + 2 * slot;
}

kernels::Vector16 to_coords(const Matrix4c& m) {
  kernels::Vector16 x;
  for (int i = 1; i <= 4; ++i) x[coords::population(i)] = m(i, i).real();
  for (int i = 2; i <= 4; ++i) {
    for (int j = 1; j < i; ++j) {
      const std::size_t k = coords::real_part(i, j);
      x[k] = m(i, j).real();
      x[k + 1] = m(i, j).imag();
    }
  }
  return x;
}

Matrix4c from_coords(const kernels::Vector16& x) {
  Matrix4c m;
  for (int i = 1; i <= 4; ++i) m(i, i) = x[coords::population(i)];
  for (int i = 2; i <= 4; ++i) {
    for (int j = 1; j < i; ++j) {
      const std::size_t k = coords::real_part(i, j);
      m(i, j) = Complex{x[k], x[k + 1]};
      m(j, i) = Complex{x[k], -x[k + 1]};
    }
  }
  return m;
}

LinearGenerator::LinearGenerator(const AtomicSystem& system, const DriveSet& detunings)
    : scheme_(system.scheme()) {
  const auto dephasing = dephasing_rates(system);

  auto real_generator = [&](const DriveSet& drives) {
    const auto h = rotating_frame_hamiltonian(system, drives);
    kernels::Matrix16 g;
    for (std::size_t col = 0; col < 16; ++col) {
      const auto image = to_coords(apply_generator(system, dephasing, h, coordinate_basis(col)));
      for (std::size_t row = 0; row < 16; ++row) g(row, col) = image[row];
    }
    return g;
  };

  DriveSet bare;
  bare.delta1 = detunings.delta1;
  bare.delta2 = detunings.delta2;
  bare.delta = detunings.delta;
  base_ = real_generator(bare);

  for (const Transition& t : transitions(scheme_)) active_[static_cast<std::size_t>(t.field)] = true;

  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t part = 0; part < 2; ++part) {
      auto& term = terms_[2 * f + part];
      if (!active_[f]) {
        term = kernels::Matrix16{};
        continue;
      }
      DriveSet unit = bare;
      unit.field(static_cast<Field>(f)) = part == 0 ? Complex{1.0, 0.0} : Complex{0.0, 1.0};
      term = real_generator(unit);
      for (std::size_t k = 0; k < term.data.size(); ++k) term.data[k] -= base_.data[k];
    }
  }
}

void LinearGenerator::assemble(const FieldAmplitudes& fields, kernels::Matrix16& out) const {
  std::array<const kernels::Matrix16*, 6> ptrs{};
  std::array<double, 6> coeffs{};
  std::size_t n = 0;
  for (std::size_t f = 0; f < 3; ++f) {
    if (!active_[f]) continue;
    // zero components add nothing; real drives skip half the terms
    if (fields[f].real() != 0.0) {
      ptrs[n] = &terms_[2 * f];
      coeffs[n++] = fields[f].real();
    }
    if (fields[f].imag() != 0.0) {
      ptrs[n] = &terms_[2 * f + 1];
      coeffs[n++] = fields[f].imag();
    }
  }
  kernels::active_kernels().combine(base_, std::span(ptrs.data(), n), std::span(coeffs.data(), n),
                                    out);
}

kernels::Matrix16 LinearGenerator::assemble(const FieldAmplitudes& fields) const {
  kernels::Matrix16 out;
  assemble(fields, out);
  return out;
}

}  // namespace fourlevel
