// AVX2+FMA dot product. Built with -mavx2 -mfma for this translation unit
// only; callers reach it through the runtime dispatch in kernels.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include "echo/kernels.hpp"

#include <immintrin.h>

#include <cassert>

namespace echo::kernels {

double dot_avx2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();

    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 8), _mm256_loadu_pd(pb + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 12), _mm256_loadu_pd(pb + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    }

    // Fixed reduction order: (acc0+acc1)+(acc2+acc3), then lanes 0..3.
    const __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];

    for (; i < n; ++i) sum += pa[i] * pb[i];
    return sum;
}

}  // namespace echo::kernels

#endif
