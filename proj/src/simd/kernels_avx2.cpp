// AVX2 variants of the arithmetic kernels. This translation unit is the only
// one compiled with -mavx2 -mfma; it must only be entered through the runtime
// dispatcher in kernels.cpp.

#if defined(__x86_64__)

#include <immintrin.h>

#include <cstddef>
#include <cstring>

namespace gpsmooth::simd::avx2 {

namespace {

// exp() for 4 doubles, Cephes-style: range reduction against log2(e), then a
// rational approximation of exp(r) on |r| <= ln(2)/2, scaled by 2^n through
// the exponent bits. Inputs below -700 flush to zero, above 709 are clamped.
constexpr double kExpLo = -700.0;
constexpr double kExpHi = 709.0;
constexpr double kLog2e = 1.4426950408889634073599;
constexpr double kC1 = 6.93145751953125e-1;
constexpr double kC2 = 1.42860682030941723212e-6;
constexpr double kP0 = 1.26177193074810590878e-4;
constexpr double kP1 = 3.02994407707441961300e-2;
constexpr double kP2 = 9.99999999999999999910e-1;
constexpr double kQ0 = 3.00198505138664455042e-6;
constexpr double kQ1 = 2.52448340349684104192e-3;
constexpr double kQ2 = 2.27265548208155028766e-1;
constexpr double kQ3 = 2.00000000000000000005e0;

inline __m256d exp4(__m256d x) {
  const __m256d flush = _mm256_cmp_pd(x, _mm256_set1_pd(kExpLo), _CMP_LT_OQ);
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpHi));
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpLo));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kC1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kC2), r);

  const __m256d z = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(kP0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kP1));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kP2));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(kQ0);
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kQ1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kQ2));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kQ3));
  const __m256d frac = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  __m256d e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), frac, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));

  return _mm256_andnot_pd(flush, e);
}

// expm1() for 4 doubles: exact Taylor evaluation for |x| < 1/32 (where
// exp(x)-1 would cancel), exp4(x)-1 elsewhere.
inline __m256d expm1_4(__m256d x) {
  const __m256d small_mask =
      _mm256_cmp_pd(_mm256_andnot_pd(_mm256_set1_pd(-0.0), x), _mm256_set1_pd(0.03125), _CMP_LT_OQ);
  // Taylor to x^7: relative error below 1e-13 on the small branch.
  __m256d p = _mm256_set1_pd(1.0 / 5040.0);
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.0));
  const __m256d taylor = _mm256_mul_pd(p, x);
  const __m256d big = _mm256_sub_pd(exp4(x), _mm256_set1_pd(1.0));
  return _mm256_blendv_pd(big, taylor, small_mask);
}

inline void exp_block(const double* in, double* out, std::size_t n, __m256d shift, __m256d scale) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = exp4(_mm256_add_pd(_mm256_loadu_pd(in + i), shift));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(v, scale));
  }
  if (i < n) {
    alignas(32) double buf[4] = {0, 0, 0, 0};
    std::memcpy(buf, in + i, (n - i) * sizeof(double));
    const __m256d v = _mm256_mul_pd(exp4(_mm256_add_pd(_mm256_load_pd(buf), shift)), scale);
    _mm256_store_pd(buf, v);
    std::memcpy(out + i, buf, (n - i) * sizeof(double));
  }
}

}  // namespace

void exp_inplace(double* x, std::size_t n) {
  exp_block(x, x, n, _mm256_setzero_pd(), _mm256_set1_pd(1.0));
}

void exp_shift_scale(const double* x, double shift, double scale, double* out, std::size_t n) {
  exp_block(x, out, n, _mm256_set1_pd(shift), _mm256_set1_pd(scale));
}

void expm1_outer_scale(double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                       const double* row_add, const double* col_add, double c, const double* qa,
                       const double* qb) {
  for (std::size_t j = 0; j < cols; ++j) {
    double* col = m + j * stride;
    const __m256d cj = _mm256_set1_pd(col_add[j] + c);
    const __m256d qbj = _mm256_set1_pd(qb[j]);
    std::size_t i = 0;
    for (; i + 4 <= rows; i += 4) {
      __m256d v = _mm256_add_pd(_mm256_loadu_pd(col + i), _mm256_loadu_pd(row_add + i));
      v = expm1_4(_mm256_add_pd(v, cj));
      v = _mm256_mul_pd(v, _mm256_mul_pd(_mm256_loadu_pd(qa + i), qbj));
      _mm256_storeu_pd(col + i, v);
    }
    if (i < rows) {
      alignas(32) double buf[4] = {0, 0, 0, 0};
      alignas(32) double radd[4] = {0, 0, 0, 0};
      alignas(32) double qbuf[4] = {0, 0, 0, 0};
      std::memcpy(buf, col + i, (rows - i) * sizeof(double));
      std::memcpy(radd, row_add + i, (rows - i) * sizeof(double));
      std::memcpy(qbuf, qa + i, (rows - i) * sizeof(double));
      __m256d v = _mm256_add_pd(_mm256_load_pd(buf), _mm256_load_pd(radd));
      v = expm1_4(_mm256_add_pd(v, cj));
      v = _mm256_mul_pd(v, _mm256_mul_pd(_mm256_load_pd(qbuf), qbj));
      _mm256_store_pd(buf, v);
      std::memcpy(col + i, buf, (rows - i) * sizeof(double));
    }
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace gpsmooth::simd::avx2

#endif  // __x86_64__
