#include "fglab/simd/modkernel.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace fglab::simd {

void axpy_mod_scalar(int64_t* y, const int64_t* x, int64_t c, int64_t q, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        __int128 t = static_cast<__int128>(c) * x[i] + y[i];
        y[i] = static_cast<int64_t>(t % q);
    }
}

#if defined(__x86_64__) || defined(__i386__)

namespace {

// Exact int64 <-> double for 0 <= v < 2^52 via the 2^52 exponent trick.
__attribute__((target("avx2"))) inline __m256d to_double(__m256i v) {
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic)), _mm256_set1_pd(4503599627370496.0));
}

__attribute__((target("avx2"))) inline __m256i to_int(__m256d d) {
    const __m256d magic = _mm256_set1_pd(4503599627370496.0);
    return _mm256_xor_si256(_mm256_castpd_si256(_mm256_add_pd(d, magic)), _mm256_castpd_si256(magic));
}

} // namespace

// With q < 2^25 every intermediate stays below 2^51, so the double arithmetic is exact
// and the floored quotient is off by at most one in either direction.
__attribute__((target("avx2"))) void axpy_mod_avx2(int64_t* y, const int64_t* x, int64_t c, int64_t q, size_t n) {
    if (q >= kVectorModulusLimit || c < 0 || c >= q) {
        axpy_mod_scalar(y, x, c, q, n);
        return;
    }
    const __m256d vc = _mm256_set1_pd(static_cast<double>(c));
    const __m256d vq = _mm256_set1_pd(static_cast<double>(q));
    const __m256d vinv = _mm256_set1_pd(1.0 / static_cast<double>(q));
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = to_double(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i)));
        __m256d dy = to_double(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(y + i)));
        __m256d t = _mm256_add_pd(_mm256_mul_pd(vc, dx), dy);
        __m256d k = _mm256_floor_pd(_mm256_mul_pd(t, vinv));
        __m256d r = _mm256_sub_pd(t, _mm256_mul_pd(k, vq));
        r = _mm256_add_pd(r, _mm256_and_pd(_mm256_cmp_pd(r, zero, _CMP_LT_OQ), vq));
        r = _mm256_sub_pd(r, _mm256_and_pd(_mm256_cmp_pd(r, vq, _CMP_GE_OQ), vq));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(y + i), to_int(r));
    }
    axpy_mod_scalar(y + i, x + i, c, q, n - i);
}

#endif

Kernel active_kernel() {
    static const Kernel k = [] {
        const char* env = std::getenv("FGLAB_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return Kernel::Scalar;
#if defined(__x86_64__) || defined(__i386__)
        if (__builtin_cpu_supports("avx2")) return Kernel::Avx2;
#endif
        return Kernel::Scalar;
    }();
    return k;
}

std::string kernel_name(Kernel k) { return k == Kernel::Avx2 ? "avx2" : "scalar"; }

void axpy_mod(int64_t* y, const int64_t* x, int64_t c, int64_t q, size_t n) {
#if defined(__x86_64__) || defined(__i386__)
    if (active_kernel() == Kernel::Avx2) {
        axpy_mod_avx2(y, x, c, q, n);
        return;
    }
#endif
    axpy_mod_scalar(y, x, c, q, n);
}

} // namespace fglab::simd
