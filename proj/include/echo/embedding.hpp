#pragma once
// Deterministic text-to-vector encoding. No learned model: tokens are
// feature-hashed (two signed buckets per token) and the result is
// L2-normalized, so identical token multisets give bit-identical vectors
// regardless of token order or the active kernel backend.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace echo {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

// Identifies the hash + feature-hashing layout. Persisted in bank headers and
// CSD metadata so stored vectors are self-describing.
inline constexpr const char* kEmbeddingVersion = "fnv1a64-fh2-v1";

struct Embedding {
    std::vector<double> values;

    Embedding() = default;
    explicit Embedding(std::size_t dim) : values(dim, 0.0) {}
    explicit Embedding(std::vector<double> v) : values(std::move(v)) {}

    std::size_t dim() const { return values.size(); }
    bool is_zero() const;
    double norm() const;

    bool operator==(const Embedding& other) const = default;
};

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t mix64(std::uint64_t x);  // splitmix64 finalizer

// Encode a token list. Empty input returns the zero vector; any non-empty
// input returns a unit vector.
Embedding encode_text(const std::vector<std::string>& tokens,
                      std::size_t dim = kDefaultEmbeddingDim);

// dot(a,b)/(|a||b|); 0.0 if either side is the zero vector.
// Throws std::invalid_argument on dimension mismatch.
double cosine(const Embedding& a, const Embedding& b);

}  // namespace echo
