#pragma once
// The retrieval operator: weighted five-axis similarity, exact top-K over a
// linear scan of the bank, per-axis evidence. Read-only over the bank;
// independent queries may run in parallel.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "echo/csd.hpp"
#include "echo/memory_bank.hpp"

namespace echo {

// Non-negative per-axis weights, normalized to sum 1 on construction.
class AxisWeights {
  public:
    // Throws std::invalid_argument unless at least one weight is positive
    // (and none negative).
    explicit AxisWeights(const std::array<double, kAxisCount>& raw);

    static AxisWeights uniform();
    static AxisWeights keep_only(Axis axis);        // indicator vector
    static AxisWeights remove(Axis axis);           // uniform over the other four

    double operator[](Axis a) const { return w_[static_cast<std::size_t>(a)]; }
    const std::array<double, kAxisCount>& values() const { return w_; }

    bool operator==(const AxisWeights&) const = default;

  private:
    std::array<double, kAxisCount> w_{};
};

// max(0, cosine) of the two axis embeddings; 0 when either side is empty.
double axis_similarity(const Csd& query, const Csd& candidate, Axis axis);

std::array<double, kAxisCount> all_axis_similarities(const Csd& query, const Csd& candidate);

// Weighted arithmetic mean of per-axis scores; stays in [0,1].
double aggregate(const std::array<double, kAxisCount>& per_axis, const AxisWeights& w);

// Uniform-weight aggregate over two CSDs (maintenance uses this).
double aggregate_similarity(const Csd& a, const Csd& b);

struct ScoredEntry {
    std::uint64_t entry_id = 0;
    double score = 0.0;
    std::array<double, kAxisCount> per_axis{};
};

struct RetrievalResult {
    std::vector<ScoredEntry> ranked;  // aggregate non-increasing
    std::uint64_t query_fingerprint = 0;
};

struct RetrievalOptions {
    int k = 8;
    AxisWeights weights = AxisWeights::uniform();
    // When set, entries with this task name are excluded (induction rounds
    // use it so a task cannot retrieve itself).
    std::optional<std::string> exclude_task;
};

// Exact top-k by aggregate score, ties broken by (later last_success_at,
// lower entry_id). Empty bank gives an empty result.
RetrievalResult retrieve_top_k(const Csd& query, const MemoryBank& bank,
                               const RetrievalOptions& opts);

std::uint64_t csd_fingerprint(const Csd& csd);

}  // namespace echo
