#pragma once

// Dense 16x16 real kernels used by the steady-state solver and the
// time-evolution oracle. Every kernel has a portable scalar reference and an
// AVX2+FMA variant; the variant is picked once at runtime from CPUID and can
// be overridden with FOURLEVEL_KERNELS=scalar|avx2.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace fourlevel::kernels {

inline constexpr std::size_t kDim = 16;

/// Row-major 16x16 matrix of doubles, aligned for 256-bit loads.
struct alignas(32) Matrix16 {
  std::array<double, kDim * kDim> data{};

  double& operator()(std::size_t row, std::size_t col) { return data[row * kDim + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data[row * kDim + col]; }
};

struct alignas(32) Vector16 {
  std::array<double, kDim> data{};

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  // out = base + sum_k coeffs[k] * terms[k]. terms.size() == coeffs.size().
  void (*combine)(const Matrix16& base, std::span<const Matrix16* const> terms,
                  std::span<const double> coeffs, Matrix16& out);

  // y = m * x
  void (*matvec)(const Matrix16& m, const Vector16& x, Vector16& y);

  // c = a * b
  void (*matmul)(const Matrix16& a, const Matrix16& b, Matrix16& c);

  // Solves a * x = b by Gaussian elimination with partial pivoting.
  // Returns false when a pivot falls below pivot_floor (numerically singular).
  bool (*solve)(const Matrix16& a, const Vector16& b, Vector16& x, double pivot_floor);
};

const KernelTable& scalar_kernels();

/// Null when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

/// The table selected for this process.
const KernelTable& active_kernels();

/// Overrides the selection (tests, benchmarks). Returns false if unavailable.
bool select_kernels(Isa isa);

}  // namespace fourlevel::kernels
