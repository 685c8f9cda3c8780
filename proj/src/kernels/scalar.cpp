#include "fourlevel/kernels.hpp"

#include <cmath>
#include <utility>

namespace fourlevel::kernels {
namespace {

void combine_scalar(const Matrix16& base, std::span<const Matrix16* const> terms,
                    std::span<const double> coeffs, Matrix16& out) {
  out = base;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = coeffs[k];
    if (c == 0.0) continue;
    const auto& t = terms[k]->data;
    for (std::size_t i = 0; i < kDim * kDim; ++i) out.data[i] += c * t[i];
  }
}

void matvec_scalar(const Matrix16& m, const Vector16& x, Vector16& y) {
  for (std::size_t r = 0; r < kDim; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < kDim; ++c) acc += m(r, c) * x[c];
    y[r] = acc;
  }
}

void matmul_scalar(const Matrix16& a, const Matrix16& b, Matrix16& c) {
  Matrix16 out;
  for (std::size_t r = 0; r < kDim; ++r) {
    for (std::size_t k = 0; k < kDim; ++k) {
      const double s = a(r, k);
      for (std::size_t j = 0; j < kDim; ++j) out(r, j) += s * b(k, j);
    }
  }
  c = out;
}

bool solve_scalar(const Matrix16& a, const Vector16& b, Vector16& x, double pivot_floor) {
  // augmented copy; column kDim holds the right-hand side
  double m[kDim][kDim + 1];
  for (std::size_t r = 0; r < kDim; ++r) {
    for (std::size_t c = 0; c < kDim; ++c) m[r][c] = a(r, c);
    m[r][kDim] = b[r];
  }

  for (std::size_t k = 0; k < kDim; ++k) {
    std::size_t p = k;
    double best = std::abs(m[k][k]);
    for (std::size_t r = k + 1; r < kDim; ++r) {
      if (std::abs(m[r][k]) > best) {
        best = std::abs(m[r][k]);
        p = r;
      }
    }
    if (!(best > pivot_floor)) return false;
    if (p != k) {
      for (std::size_t c = 0; c <= kDim; ++c) std::swap(m[k][c], m[p][c]);
    }
    const double inv = 1.0 / m[k][k];
    for (std::size_t r = k + 1; r < kDim; ++r) {
      const double f = m[r][k] * inv;
      if (f == 0.0) continue;
      for (std::size_t c = k + 1; c <= kDim; ++c) m[r][c] -= f * m[k][c];
    }
  }

  for (std::size_t i = kDim; i-- > 0;) {
    double acc = m[i][kDim];
    for (std::size_t c = i + 1; c < kDim; ++c) acc -= m[i][c] * x[c];
    x[i] = acc / m[i][i];
  }
  return true;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, "scalar", &combine_scalar, &matvec_scalar,
                                 &matmul_scalar, &solve_scalar};
  return table;
}

}  // namespace fourlevel::kernels
