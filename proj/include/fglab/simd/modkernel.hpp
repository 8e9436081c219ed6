#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace fglab::simd {

// y[i] <- (y[i] + c * x[i]) mod q for residues in [0, q).
// The vector variant is exact for q < 2^25; larger moduli always take the scalar path.
constexpr int64_t kVectorModulusLimit = int64_t{1} << 25;

void axpy_mod_scalar(int64_t* y, const int64_t* x, int64_t c, int64_t q, size_t n);
#if defined(__x86_64__) || defined(__i386__)
void axpy_mod_avx2(int64_t* y, const int64_t* x, int64_t c, int64_t q, size_t n);
#endif

enum class Kernel { Scalar, Avx2 };

// Chosen once at startup from CPU features; FGLAB_SIMD=scalar forces the reference path.
Kernel active_kernel();
std::string kernel_name(Kernel k);
void axpy_mod(int64_t* y, const int64_t* x, int64_t c, int64_t q, size_t n);

} // namespace fglab::simd
