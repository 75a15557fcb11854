#include "echo/kernels.hpp"

#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace echo::kernels {

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "?";
}

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

namespace {

Backend best_backend() {
    if (backend_supported(Backend::Avx2)) return Backend::Avx2;
    if (backend_supported(Backend::Neon)) return Backend::Neon;
    return Backend::Scalar;
}

Backend resolve_from_env() {
    const char* env = std::getenv("ECHO_KERNEL");
    if (env == nullptr || std::string(env) == "auto") return best_backend();
    const std::string want(env);
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (want == backend_name(b)) {
            if (!backend_supported(b))
                throw std::invalid_argument("ECHO_KERNEL=" + want + " not supported on this CPU");
            return b;
        }
    }
    throw std::invalid_argument("ECHO_KERNEL=" + want + " (expected scalar|avx2|neon|auto)");
}

Backend& active_slot() {
    static Backend active = resolve_from_env();
    return active;
}

}  // namespace

Backend active_backend() { return active_slot(); }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::invalid_argument(std::string("kernel backend not supported: ") + backend_name(b));
    active_slot() = b;
}

double dot(std::span<const double> a, std::span<const double> b) {
    switch (active_slot()) {
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::Avx2: return dot_avx2(a, b);
#endif
#if defined(__aarch64__)
        case Backend::Neon: return dot_neon(a, b);
#endif
        default: return dot_scalar(a, b);
    }
}

}  // namespace echo::kernels
