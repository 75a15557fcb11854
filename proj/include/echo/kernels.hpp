#pragma once
// Inner-product kernels behind all embedding math. One scalar reference
// implementation plus SIMD variants, selected once at runtime. The selection
// can be forced with the ECHO_KERNEL environment variable
// (scalar|avx2|neon|auto) or programmatically via set_backend().
//
// Contract: for vectors whose elements are exactly-representable integers
// (the accumulation stage of text encoding), every backend returns the
// bit-identical sum; for arbitrary inputs backends agree to ~1e-12 relative.

#include <cstddef>
#include <span>

namespace echo::kernels {

enum class Backend { Scalar, Avx2, Neon };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// The backend currently in use. Resolved lazily from ECHO_KERNEL on first use.
Backend active_backend();

// Force a backend. Throws std::invalid_argument if unsupported on this CPU.
void set_backend(Backend b);

// dot(a, b) over equal-length vectors, dispatched to the active backend.
double dot(std::span<const double> a, std::span<const double> b);

// Fixed implementations, exposed so equivalence tests can pin them directly.
double dot_scalar(std::span<const double> a, std::span<const double> b);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(std::span<const double> a, std::span<const double> b);
#endif
#if defined(__aarch64__)
double dot_neon(std::span<const double> a, std::span<const double> b);
#endif

}  // namespace echo::kernels
