// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// CPUID check, so nothing here may be inlined into generic translation units.

#include "fourlevel/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <utility>

namespace fourlevel::kernels {
namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kRowVecs = kDim / kLanes;  // 4 vectors per matrix row

void combine_avx2(const Matrix16& base, std::span<const Matrix16* const> terms,
                  std::span<const double> coeffs, Matrix16& out) {
  const std::size_t n = terms.size();
  for (std::size_t i = 0; i < kDim * kDim; i += kLanes) {
    __m256d acc = _mm256_load_pd(&base.data[i]);
    for (std::size_t k = 0; k < n; ++k) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(coeffs[k]), _mm256_load_pd(&terms[k]->data[i]), acc);
    }
    _mm256_store_pd(&out.data[i], acc);
  }
}

inline __m256d reduce4(__m256d a0, __m256d a1, __m256d a2, __m256d a3) {
  const __m256d t0 = _mm256_hadd_pd(a0, a1);
  const __m256d t1 = _mm256_hadd_pd(a2, a3);
  const __m256d lo = _mm256_permute2f128_pd(t0, t1, 0x20);
  const __m256d hi = _mm256_permute2f128_pd(t0, t1, 0x31);
  return _mm256_add_pd(lo, hi);
}

void matvec_avx2(const Matrix16& m, const Vector16& x, Vector16& y) {
  __m256d xv[kRowVecs];
  for (std::size_t v = 0; v < kRowVecs; ++v) xv[v] = _mm256_load_pd(&x.data[v * kLanes]);

  for (std::size_t r = 0; r < kDim; r += kLanes) {
    __m256d acc[kLanes];
    for (std::size_t q = 0; q < kLanes; ++q) {
      const double* row = &m.data[(r + q) * kDim];
      __m256d a = _mm256_mul_pd(_mm256_load_pd(row), xv[0]);
      for (std::size_t v = 1; v < kRowVecs; ++v) {
        a = _mm256_fmadd_pd(_mm256_load_pd(row + v * kLanes), xv[v], a);
      }
      acc[q] = a;
    }
    _mm256_store_pd(&y.data[r], reduce4(acc[0], acc[1], acc[2], acc[3]));
  }
}

void matmul_avx2(const Matrix16& a, const Matrix16& b, Matrix16& c) {
  Matrix16 out;
  for (std::size_t r = 0; r < kDim; ++r) {
    __m256d acc[kRowVecs];
    for (std::size_t v = 0; v < kRowVecs; ++v) acc[v] = _mm256_setzero_pd();
    for (std::size_t k = 0; k < kDim; ++k) {
      const __m256d s = _mm256_set1_pd(a(r, k));
      const double* brow = &b.data[k * kDim];
      for (std::size_t v = 0; v < kRowVecs; ++v) {
        acc[v] = _mm256_fmadd_pd(s, _mm256_load_pd(brow + v * kLanes), acc[v]);
      }
    }
    for (std::size_t v = 0; v < kRowVecs; ++v) _mm256_store_pd(&out.data[r * kDim + v * kLanes], acc[v]);
  }
  c = out;
}

// Column-major elimination: column j of the augmented matrix is four vectors,
// so the pivot search, the multipliers and each column update are vector
// operations, and columns whose pivot-row entry is zero are skipped outright
// (the Liouvillian is sparse).
bool solve_avx2(const Matrix16& a, const Vector16& b, Vector16& x, double pivot_floor) {
  alignas(32) double c[kDim + 1][kDim];  // c[j][i] = a(i, j); c[kDim] = b
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) c[j][i] = a(i, j);
    c[kDim][i] = b[i];
  }

  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d row_index[kRowVecs];
  for (std::size_t q = 0; q < kRowVecs; ++q) {
    const double base = static_cast<double>(q * kLanes);
    row_index[q] = _mm256_set_pd(base + 3, base + 2, base + 1, base);
  }

  for (std::size_t k = 0; k < kDim; ++k) {
    const __m256d kk = _mm256_set1_pd(static_cast<double>(k));

    // pivot: largest |c[k][r]| over r >= k, lowest index on ties
    __m256d mag[kRowVecs];
    for (std::size_t q = 0; q < kRowVecs; ++q) {
      const __m256d v = _mm256_andnot_pd(sign_mask, _mm256_load_pd(&c[k][q * kLanes]));
      const __m256d below = _mm256_cmp_pd(row_index[q], kk, _CMP_GE_OQ);
      mag[q] = _mm256_blendv_pd(_mm256_set1_pd(-1.0), v, below);
    }
    __m256d mx = _mm256_max_pd(_mm256_max_pd(mag[0], mag[1]), _mm256_max_pd(mag[2], mag[3]));
    mx = _mm256_max_pd(mx, _mm256_permute2f128_pd(mx, mx, 0x01));
    mx = _mm256_max_pd(mx, _mm256_permute_pd(mx, 0x5));
    const double best = _mm256_cvtsd_f64(mx);
    if (!(best > pivot_floor)) return false;
    unsigned hits = 0;
    for (std::size_t q = 0; q < kRowVecs; ++q) {
      hits |= static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(mag[q], mx, _CMP_EQ_OQ)))
              << (q * kLanes);
    }
    const auto p = static_cast<std::size_t>(__builtin_ctz(hits));

    if (p != k) {
      for (std::size_t j = k; j <= kDim; ++j) std::swap(c[j][k], c[j][p]);
    }

    // multipliers for rows below k; rows <= k hold U and must stay untouched
    const __m256d inv = _mm256_set1_pd(1.0 / c[k][k]);
    const std::size_t q0 = (k + 1) / kLanes;
    __m256d mult[kRowVecs];
    for (std::size_t q = q0; q < kRowVecs; ++q) {
      const __m256d below = _mm256_cmp_pd(row_index[q], kk, _CMP_GT_OQ);
      mult[q] = _mm256_and_pd(below, _mm256_mul_pd(_mm256_load_pd(&c[k][q * kLanes]), inv));
    }
    for (std::size_t j = k + 1; j <= kDim; ++j) {
      const double u = c[j][k];
      if (u == 0.0) continue;
      const __m256d uv = _mm256_set1_pd(u);
      for (std::size_t q = q0; q < kRowVecs; ++q) {
        const __m256d col = _mm256_load_pd(&c[j][q * kLanes]);
        _mm256_store_pd(&c[j][q * kLanes], _mm256_fnmadd_pd(mult[q], uv, col));
      }
    }
  }

  // back substitution, column-oriented: y -= x_i * U(:, i)
  __m256d y[kRowVecs];
  for (std::size_t q = 0; q < kRowVecs; ++q) y[q] = _mm256_load_pd(&c[kDim][q * kLanes]);
  alignas(32) double ys[kDim];
  for (std::size_t i = kDim; i-- > 0;) {
    for (std::size_t q = 0; q < kRowVecs; ++q) _mm256_store_pd(&ys[q * kLanes], y[q]);
    const double xi = ys[i] / c[i][i];
    x[i] = xi;
    const __m256d xv = _mm256_set1_pd(xi);
    for (std::size_t q = 0; q <= (i == 0 ? 0 : (i - 1) / kLanes); ++q) {
      y[q] = _mm256_fnmadd_pd(xv, _mm256_load_pd(&c[i][q * kLanes]), y[q]);
    }
  }
  return true;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::Avx2, "avx2", &combine_avx2, &matvec_avx2, &matmul_avx2,
                                 &solve_avx2};
  return table;
}

}  // namespace fourlevel::kernels
