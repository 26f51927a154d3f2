#include "sdax/kernels.hpp"

#ifdef SDAX_BUILD_AVX2
#include <immintrin.h>

namespace sdax::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double dot_row(const double* a, const double* b, int n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace

void matvec(const double* w, const double* x, const double* b, double* y,
            int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* wr = w + static_cast<std::size_t>(r) * cols;
    const double acc = dot_row(wr, x, cols);
    y[r] = b ? acc + b[r] : acc;
  }
}

void matvec_t_acc(const double* w, const double* c, double* xg, int rows,
                  int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* wr = w + static_cast<std::size_t>(r) * cols;
    const __m256d cr = _mm256_set1_pd(c[r]);
    int k = 0;
    for (; k + 4 <= cols; k += 4) {
      __m256d acc = _mm256_loadu_pd(xg + k);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(wr + k), cr, acc);
      _mm256_storeu_pd(xg + k, acc);
    }
    for (; k < cols; ++k) xg[k] += wr[k] * c[r];
  }
}

void ger_acc(double* g, const double* c, const double* x, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    double* gr = g + static_cast<std::size_t>(r) * cols;
    const __m256d cr = _mm256_set1_pd(c[r]);
    int k = 0;
    for (; k + 4 <= cols; k += 4) {
      __m256d acc = _mm256_loadu_pd(gr + k);
      acc = _mm256_fmadd_pd(cr, _mm256_loadu_pd(x + k), acc);
      _mm256_storeu_pd(gr + k, acc);
    }
    for (; k < cols; ++k) gr[k] += c[r] * x[k];
  }
}

double dot(const double* a, const double* b, int n) { return dot_row(a, b, n); }

void axpy(double alpha, const double* x, double* y, int n) {
  const __m256d va = _mm256_set1_pd(alpha);
  int k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d acc = _mm256_loadu_pd(y + k);
    acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), acc);
    _mm256_storeu_pd(y + k, acc);
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace sdax::kern::avx2
#endif  // SDAX_BUILD_AVX2
