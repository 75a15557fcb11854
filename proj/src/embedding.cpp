#include "echo/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "echo/kernels.hpp"

namespace echo {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double Embedding::norm() const {
    return std::sqrt(kernels::dot(values, values));
}

bool Embedding::is_zero() const {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

Embedding encode_text(const std::vector<std::string>& tokens, std::size_t dim) {
    Embedding e(dim);
    if (tokens.empty() || dim == 0) return e;

    for (const std::string& tok : tokens) {
        const std::uint64_t h = fnv1a64(tok);
        const std::uint64_t g = mix64(h);
        e.values[h % dim] += (h >> 63) ? -1.0 : 1.0;
        e.values[g % dim] += (g >> 63) ? -1.0 : 1.0;
    }

    // Accumulated values are small integers, so this sum is exact under every
    // kernel backend and the final vector is bit-deterministic.
    double sum_sq = kernels::dot(e.values, e.values);
    if (sum_sq == 0.0) {
        // Distinct tokens cancelled each other exactly; keep the non-empty
        // invariant (unit norm) with a deterministic single-bucket vector.
        e.values[fnv1a64(tokens.front()) % dim] = 1.0;
        sum_sq = 1.0;
    }
    const double inv = 1.0 / std::sqrt(sum_sq);
    for (double& v : e.values) v *= inv;
    return e;
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()) + ")");
    const double na = kernels::dot(a.values, a.values);
    const double nb = kernels::dot(b.values, b.values);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return kernels::dot(a.values, b.values) / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace echo
