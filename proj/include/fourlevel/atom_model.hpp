#pragma once

// Level schemes and the rotating-frame master-equation generator.
//
// Levels are labelled 1..4 exactly as |1>..|4>, and every accessor taking a
// level index is 1-based. Rates, Rabi amplitudes and detunings are all in
// units of a reference decay rate gamma.

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <span>

#include "fourlevel/kernels.hpp"

namespace fourlevel {

using Complex = std::complex<double>;

enum class Scheme { Ladder4, Ypsilon4 };

const char* to_string(Scheme scheme);

/// Ordered level pair (i, j) with i < j. As a decay key it names spontaneous
/// emission from |j> to |i>.
struct LevelPair {
  int lower = 0;
  int upper = 0;

  auto operator<=>(const LevelPair&) const = default;
};

/// Decay channels allowed for a scheme: ladder {(1,2),(2,3),(3,4)},
/// Y-type {(1,2),(2,3),(2,4)}.
std::span<const LevelPair> decay_channels(Scheme scheme);

class AtomicSystem {
 public:
  /// Throws SimulationError(Parameter) on a negative or non-finite rate or a
  /// channel set that does not match the scheme.
  AtomicSystem(Scheme scheme, std::map<LevelPair, double> decays, double gamma_coll = 0.0);

  static AtomicSystem ladder(double g12, double g23, double g34, double gamma_coll = 0.0);
  static AtomicSystem ypsilon(double g12, double g23, double g24, double gamma_coll = 0.0);

  Scheme scheme() const noexcept { return scheme_; }
  const std::map<LevelPair, double>& decays() const noexcept { return decays_; }
  double decay(int lower, int upper) const;
  double gamma_coll() const noexcept { return gamma_coll_; }

  /// Sum of the spontaneous rates leaving |level>.
  double decay_out_of(int level) const;

  /// Smallest strictly positive decay rate, or 0 when every rate vanishes.
  double min_nonzero_decay() const;

  bool operator==(const AtomicSystem&) const = default;

 private:
  Scheme scheme_;
  std::map<LevelPair, double> decays_;
  double gamma_coll_;
};

/// Symmetric table of coherence dephasing rates Gamma_ij (diagonal is zero).
class DephasingRates {
 public:
  double operator()(int i, int j) const { return rates_[index(i, j)]; }
  double max() const;

 private:
  friend DephasingRates dephasing_rates(const AtomicSystem& system);
  static std::size_t index(int i, int j) { return static_cast<std::size_t>((i - 1) * 4 + (j - 1)); }
  std::array<double, 16> rates_{};
};

/// Gamma_ij = (total decay out of |i> + total decay out of |j>) / 2 + gamma_coll.
DephasingRates dephasing_rates(const AtomicSystem& system);

enum class Field { Coupling = 0, Probe = 1, Control = 2 };

const char* to_string(Field field);

using FieldAmplitudes = std::array<Complex, 3>;  // indexed by Field

/// Drive amplitudes (half Rabi frequencies) and detunings.
///
/// Ladder: coupling G1 on 1-2, probe G2 on 2-3, control G on 3-4.
/// Y-type: probe g on both 1-2 and 2-3, control G on 2-4; coupling unused
/// and must be zero.
struct DriveSet {
  Complex coupling{};
  Complex probe{};
  Complex control{};
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta = 0.0;

  FieldAmplitudes fields() const { return {coupling, probe, control}; }
  Complex& field(Field f);
  Complex field(Field f) const;
  double max_amplitude() const;

  bool operator==(const DriveSet&) const = default;
};

/// Throws SimulationError(Parameter) when drives do not fit the scheme.
void check_drives(const AtomicSystem& system, const DriveSet& drives);

/// 4x4 complex matrix addressed with 1-based level labels.
class Matrix4c {
 public:
  Complex& operator()(int i, int j) { return e_[idx(i, j)]; }
  const Complex& operator()(int i, int j) const { return e_[idx(i, j)]; }

  /// Row-major vectorisation: element (i, j) sits at 4*(i-1) + (j-1).
  std::array<Complex, 16>& vec() noexcept { return e_; }
  const std::array<Complex, 16>& vec() const noexcept { return e_; }

  Complex trace() const;
  Matrix4c adjoint() const;
  double max_abs_diff(const Matrix4c& other) const;
  double max_abs() const;

  static Matrix4c projector(int level);

  bool operator==(const Matrix4c&) const = default;

 private:
  static std::size_t idx(int i, int j) { return static_cast<std::size_t>((i - 1) * 4 + (j - 1)); }
  std::array<Complex, 16> e_{};
};

using DensityMatrix = Matrix4c;

struct PhysicalityReport {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_population = 0.0;
  double max_population = 0.0;
};

PhysicalityReport physicality(const DensityMatrix& rho);

/// Hermitian within 1e-12, unit trace within 1e-12, populations in
/// [-1e-8, 1 + 1e-8].
bool is_density_matrix(const DensityMatrix& rho);

/// Row-major 16x16 complex matrix acting on vec(rho).
struct ComplexMatrix16 {
  std::array<Complex, 256> data{};

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * 16 + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * 16 + c]; }
};

/// Rotating-frame Hamiltonian (units of gamma, hbar = 1).
Matrix4c rotating_frame_hamiltonian(const AtomicSystem& system, const DriveSet& drives);

/// d(rho)/dt = -i[H, rho] + spontaneous transfer - dephasing of coherences.
Matrix4c rhs(const AtomicSystem& system, const DriveSet& drives, const Matrix4c& rho);

/// The generator as a matrix on vec(rho); all 16 components are retained.
ComplexMatrix16 liouvillian(const AtomicSystem& system, const DriveSet& drives);

std::array<Complex, 16> multiply(const ComplexMatrix16& m, const std::array<Complex, 16>& v);

// Real coordinates of a Hermitian matrix:
//   [rho11, rho22, rho33, rho44,
//    Re rho21, Im rho21, Re rho31, Im rho31, Re rho41, Im rho41,
//    Re rho32, Im rho32, Re rho42, Im rho42, Re rho43, Im rho43]
namespace coords {
constexpr std::size_t population(int level) { return static_cast<std::size_t>(level - 1); }
/// Index of Re rho_ij for i > j; the imaginary part follows at +1.
std::size_t real_part(int i, int j);
}  // namespace coords

kernels::Vector16 to_coords(const Matrix4c& hermitian);
Matrix4c from_coords(const kernels::Vector16& x);

/// The generator restricted to Hermitian matrices, written in real
/// coordinates and split by linearity into a drive-independent part plus one
/// matrix per real and imaginary field component. Assembling for new field
/// values is a single fused multiply-add pass.
class LinearGenerator {
 public:
  LinearGenerator(const AtomicSystem& system, const DriveSet& detunings);

  void assemble(const FieldAmplitudes& fields, kernels::Matrix16& out) const;
  kernels::Matrix16 assemble(const FieldAmplitudes& fields) const;

  Scheme scheme() const noexcept { return scheme_; }

 private:
  Scheme scheme_;
  kernels::Matrix16 base_;
  std::array<kernels::Matrix16, 6> terms_;  // (Re, Im) x (coupling, probe, control)
  std::array<bool, 3> active_{};
};

}  // namespace fourlevel
