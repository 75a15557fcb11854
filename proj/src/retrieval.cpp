#include "echo/retrieval.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace echo {

AxisWeights::AxisWeights(const std::array<double, kAxisCount>& raw) {
    double sum = 0.0;
    for (double v : raw) {
        if (v < 0.0) throw std::invalid_argument("axis weights must be non-negative");
        sum += v;
    }
    if (sum <= 0.0) throw std::invalid_argument("at least one axis weight must be positive");
    for (std::size_t i = 0; i < kAxisCount; ++i) w_[i] = raw[i] / sum;
}

AxisWeights AxisWeights::uniform() {
    return AxisWeights({1.0, 1.0, 1.0, 1.0, 1.0});
}

AxisWeights AxisWeights::keep_only(Axis axis) {
    std::array<double, kAxisCount> raw{};
    raw[static_cast<std::size_t>(axis)] = 1.0;
    return AxisWeights(raw);
}

AxisWeights AxisWeights::remove(Axis axis) {
    std::array<double, kAxisCount> raw{1.0, 1.0, 1.0, 1.0, 1.0};
    raw[static_cast<std::size_t>(axis)] = 0.0;
    return AxisWeights(raw);
}

double axis_similarity(const Csd& query, const Csd& candidate, Axis axis) {
    const Embedding& q = query.axis(axis).embedding;
    const Embedding& c = candidate.axis(axis).embedding;
    if (q.values.empty() || c.values.empty()) return 0.0;
    return std::max(0.0, cosine(q, c));
}

std::array<double, kAxisCount> all_axis_similarities(const Csd& query, const Csd& candidate) {
    std::array<double, kAxisCount> out{};
    for (Axis a : kAxes) out[static_cast<std::size_t>(a)] = axis_similarity(query, candidate, a);
    return out;
}

double aggregate(const std::array<double, kAxisCount>& per_axis, const AxisWeights& w) {
    double sum = 0.0;
    for (Axis a : kAxes)
        sum += w[a] * per_axis[static_cast<std::size_t>(a)];
    return sum;
}

double aggregate_similarity(const Csd& a, const Csd& b) {
    return aggregate(all_axis_similarities(a, b), AxisWeights::uniform());
}

std::uint64_t csd_fingerprint(const Csd& csd) {
    return fnv1a64(csd_to_json(csd).dump());
}

namespace {

struct Candidate {
    double score;
    EpisodeTime last_success_at;
    std::uint64_t entry_id;
    std::array<double, kAxisCount> per_axis;
};

// true when a ranks strictly better than b.
bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.last_success_at != b.last_success_at) return a.last_success_at > b.last_success_at;
    return a.entry_id < b.entry_id;
}

}  // namespace

RetrievalResult retrieve_top_k(const Csd& query, const MemoryBank& bank,
                               const RetrievalOptions& opts) {
    if (opts.k < 1) throw std::invalid_argument("retrieve_top_k: k must be >= 1");

    RetrievalResult result;
    result.query_fingerprint = csd_fingerprint(query);

    // Bounded worst-first heap: the top element is the weakest of the current
    // best k, so a new candidate only displaces it when it ranks before it.
    auto worse = [](const Candidate& a, const Candidate& b) { return ranks_before(a, b); };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse);

    for (const MemoryEntry& entry : bank.entries()) {
        if (opts.exclude_task && entry.task_name == *opts.exclude_task) continue;
        Candidate c;
        c.per_axis = all_axis_similarities(query, entry.csd);
        c.score = aggregate(c.per_axis, opts.weights);
        c.last_success_at = entry.last_success_at;
        c.entry_id = entry.entry_id;
        if (heap.size() < static_cast<std::size_t>(opts.k)) {
            heap.push(c);
        } else if (ranks_before(c, heap.top())) {
            heap.pop();
            heap.push(c);
        }
    }

    std::vector<Candidate> picked;
    picked.reserve(heap.size());
    while (!heap.empty()) {
        picked.push_back(heap.top());
        heap.pop();
    }
    std::reverse(picked.begin(), picked.end());

    result.ranked.reserve(picked.size());
    for (const Candidate& c : picked)
        result.ranked.push_back({c.entry_id, c.score, c.per_axis});
    return result;
}

}  // namespace echo
