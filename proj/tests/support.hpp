#pragma once

// Shared fixtures for the unit tests: seeded random states and drives, and an
// Eigen-based Hermitian eigenvalue check.

#include <Eigen/Dense>
#include <random>

#include "fourlevel/atom_model.hpp"

namespace testing {

using fourlevel::Complex;
using fourlevel::DensityMatrix;
using fourlevel::DriveSet;
using fourlevel::Matrix4c;
using fourlevel::Scheme;

inline Complex random_complex(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

inline Matrix4c random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix4c m;
  for (int i = 1; i <= 4; ++i) {
    m(i, i) = u(rng);
    for (int j = 1; j < i; ++j) {
      m(i, j) = random_complex(rng, scale);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

/// A A^dagger / tr, a random full-rank density matrix.
inline DensityMatrix random_density_matrix(std::mt19937_64& rng) {
  Matrix4c a;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) a(i, j) = random_complex(rng, 1.0);
  DensityMatrix rho;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j)
      for (int k = 1; k <= 4; ++k) rho(i, j) += a(i, k) * std::conj(a(j, k));
  const double tr = rho.trace().real();
  for (auto& z : rho.vec()) z /= tr;
  for (int i = 1; i <= 4; ++i) rho(i, i) = rho(i, i).real();
  return rho;
}

inline DriveSet random_drives(std::mt19937_64& rng, Scheme scheme, double amplitude = 5.0,
                              double detuning = 5.0) {
  std::uniform_real_distribution<double> d(-detuning, detuning);
  DriveSet drives;
  if (scheme == Scheme::Ladder4) drives.coupling = random_complex(rng, amplitude);
  drives.probe = random_complex(rng, amplitude);
  drives.control = random_complex(rng, amplitude);
  drives.delta1 = d(rng);
  drives.delta2 = d(rng);
  drives.delta = d(rng);
  return drives;
}

inline fourlevel::AtomicSystem random_system(std::mt19937_64& rng, Scheme scheme, double lo = 0.2,
                                             double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double a = u(rng), b = u(rng), c = u(rng);
  return scheme == Scheme::Ladder4 ? fourlevel::AtomicSystem::ladder(a, b, c)
                                   : fourlevel::AtomicSystem::ypsilon(a, b, c);
}

inline double min_eigenvalue(const Matrix4c& m) {
  Eigen::Matrix4cd e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e(i, j) = m(i + 1, j + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(e, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline double max_abs(const std::array<Complex, 16>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace testing
