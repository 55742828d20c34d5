// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "rothe/kernels.hpp"

#include <immintrin.h>

namespace rothe::kernels::avx2 {

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  const double* py = y.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i + 4), _mm256_loadu_pd(py + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += px[i] * py[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(py + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i)));
  for (; i < n; ++i) py[i] += alpha * px[i];
}

void tridiag_matvec(TridiagView a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = a.diag.size();
  if (n < 6) {
    scalar::tridiag_matvec(a, x, y);
    return;
  }
  const double* lo = a.lower.data();
  const double* d = a.diag.data();
  const double* up = a.upper.data();
  const double* px = x.data();
  double* py = y.data();

  py[0] = d[0] * px[0] + up[0] * px[1];
  // interior rows 1..n-2: lower[i-1]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1]
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(px + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(lo + i - 1), _mm256_loadu_pd(px + i - 1), acc);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(px + i + 1), acc);
    _mm256_storeu_pd(py + i, acc);
  }
  for (; i + 1 < n; ++i) py[i] = lo[i - 1] * px[i - 1] + d[i] * px[i] + up[i] * px[i + 1];
  py[n - 1] = lo[n - 2] * px[n - 2] + d[n - 1] * px[n - 1];
}

}  // namespace rothe::kernels::avx2
