#pragma once

#include <cstddef>

namespace gpsmooth::simd {

enum class Isa { Scalar, Avx2 };

// ISA selected at startup: AVX2 when the CPU supports it, else scalar.
// GPSMOOTH_SIMD=scalar|avx2|auto overrides. force() is for tests.
Isa active();
void force(Isa isa);
const char* isa_name(Isa isa);
bool cpu_has_avx2();

// x[i] = exp(x[i]). Valid input range is [-700, 709]; values below are
// flushed to 0, values above clamped (the AVX2 path has no denormal tail).
void exp_inplace(double* x, std::size_t n);

// out[i] = scale * exp(x[i] + shift), same range contract.
void exp_shift_scale(const double* x, double shift, double scale, double* out, std::size_t n);

// Column-major fused assembly of the residual exponent matrix:
//   m[i + j*stride] = qa[i] * qb[j] * expm1(m[i + j*stride] + row_add[i] + col_add[j] + c)
// for i < rows, j < cols. expm1 keeps entries accurate where the exponent is
// near zero (exactly where exp(.)-products would cancel catastrophically).
void expm1_outer_scale(double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                       const double* row_add, const double* col_add, double c, const double* qa,
                       const double* qb);

double dot(const double* a, const double* b, std::size_t n);

}  // namespace gpsmooth::simd
