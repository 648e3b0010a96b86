#include "gpsmooth/simd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace gpsmooth::simd {

// AVX2 entry points, compiled in kernels_avx2.cpp with -mavx2 -mfma.
#if defined(__x86_64__)
namespace avx2 {
void exp_inplace(double* x, std::size_t n);
void exp_shift_scale(const double* x, double shift, double scale, double* out, std::size_t n);
void expm1_outer_scale(double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                       const double* row_add, const double* col_add, double c, const double* qa,
                       const double* qb);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

namespace scalar {

void exp_inplace(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(x[i]);
}

void exp_shift_scale(const double* x, double shift, double scale, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * std::exp(x[i] + shift);
}

void expm1_outer_scale(double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                       const double* row_add, const double* col_add, double c, const double* qa,
                       const double* qb) {
  for (std::size_t j = 0; j < cols; ++j) {
    double* col = m + j * stride;
    const double cj = col_add[j] + c;
    const double qbj = qb[j];
    for (std::size_t i = 0; i < rows; ++i) {
      col[i] = qa[i] * qbj * std::expm1(col[i] + row_add[i] + cj);
    }
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace scalar

bool cpu_has_avx2() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

std::atomic<Isa> g_isa{Isa::Scalar};
std::once_flag g_init;

Isa resolve_from_env() {
  const char* env = std::getenv("GPSMOOTH_SIMD");
  if (env) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Isa::Avx2;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

Isa current() {
  std::call_once(g_init, [] { g_isa.store(resolve_from_env()); });
  return g_isa.load();
}

}  // namespace

Isa active() { return current(); }

void force(Isa isa) {
  current();  // make sure env resolution already happened
  g_isa.store(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void exp_inplace(double* x, std::size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::exp_inplace(x, n);
#endif
  scalar::exp_inplace(x, n);
}

void exp_shift_scale(const double* x, double shift, double scale, double* out, std::size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::exp_shift_scale(x, shift, scale, out, n);
#endif
  scalar::exp_shift_scale(x, shift, scale, out, n);
}

void expm1_outer_scale(double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                       const double* row_add, const double* col_add, double c, const double* qa,
                       const double* qb) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) {
    return avx2::expm1_outer_scale(m, rows, cols, stride, row_add, col_add, c, qa, qb);
  }
#endif
  scalar::expm1_outer_scale(m, rows, cols, stride, row_add, col_add, c, qa, qb);
}

double dot(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::dot(a, b, n);
#endif
  return scalar::dot(a, b, n);
}

}  // namespace gpsmooth::simd
