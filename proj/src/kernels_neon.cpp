// NEON dot product for aarch64 builds.

#if defined(__aarch64__)

#include "echo/kernels.hpp"

#include <arm_neon.h>

#include <cassert>

namespace echo::kernels {

double dot_neon(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();

    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(pa + i), vld1q_f64(pb + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(pa + i + 2), vld1q_f64(pb + i + 2));
    }
    const float64x2_t acc = vaddq_f64(acc0, acc1);
    double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) sum += pa[i] * pb[i];
    return sum;
}

}  // namespace echo::kernels

#endif
