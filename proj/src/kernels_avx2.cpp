// AVX2 variants of the probability-vector kernels. Compiled with -mavx2 -mfma
// in its own translation unit; only reached when runtime dispatch selects the
// avx2 backend.

#if defined(SPECDEC_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "specdec/kernels.hpp"

namespace specdec::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

const __m256d kSignMask = _mm256_set1_pd(-0.0);
const __m256d kZero = _mm256_setzero_pd();

}  // namespace

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double out = hsum(acc);
  for (; i < n; ++i) out += x[i];
  return out;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double out = hsum(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

double abs_diff_sum_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(kSignMask, d));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += std::fabs(a[i] - b[i]);
  return out;
}

void mix_avx2(double* dst, const double* p, const double* q, double w_q, std::size_t n) {
  const double w_p = 1.0 - w_q;
  const __m256d vp = _mm256_set1_pd(w_p);
  const __m256d vq = _mm256_set1_pd(w_q);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(vp, _mm256_loadu_pd(p + i));
    r = _mm256_fmadd_pd(vq, _mm256_loadu_pd(q + i), r);
    _mm256_storeu_pd(dst + i, r);
  }
  for (; i < n; ++i) dst[i] = w_p * p[i] + w_q * q[i];
}

double clamped_diff_avx2(double* dst, const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(q + i));
    d = _mm256_max_pd(d, kZero);
    _mm256_storeu_pd(dst + i, d);
    acc = _mm256_add_pd(acc, d);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    const double d = p[i] - q[i];
    dst[i] = d > 0.0 ? d : 0.0;
    out += dst[i];
  }
  return out;
}

double clamped_diff_sum_avx2(const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(q + i));
    acc = _mm256_add_pd(acc, _mm256_max_pd(d, kZero));
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    const double d = p[i] - q[i];
    if (d > 0.0) out += d;
  }
  return out;
}

void scale_avx2(double* dst, const double* x, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) dst[i] = c * x[i];
}

}  // namespace specdec::kernels::detail

#endif  // SPECDEC_HAVE_AVX2
