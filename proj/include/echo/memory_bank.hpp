#pragma once
// Long-term memory: an append-only store of successful task experiences with
// dual symbolic/vector representation, a separate failure log, and offline
// maintenance (deduplication, cleaning, clustering). Concurrency contract:
// many readers or one writer; maintenance requires exclusive access.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "echo/csd.hpp"
#include "echo/world.hpp"

namespace echo {

struct MemoryEntry {
    std::uint64_t entry_id = 0;
    std::string task_name;
    Csd csd;
    std::vector<Action> action_sequence;
    std::int64_t success_count = 1;
    std::int64_t attempt_count = 1;
    EpisodeTime last_success_at;

    bool operator==(const MemoryEntry&) const = default;
};

struct FailureRecord {
    std::string task_name;
    std::vector<Action> actions;
    std::string reason;
    EpisodeTime at;

    bool operator==(const FailureRecord&) const = default;
};

struct ClusterSet {
    struct Cluster {
        std::vector<std::uint64_t> entry_ids;
        std::array<Embedding, kAxisCount> centroids;  // normalized mean per axis
    };
    std::vector<Cluster> clusters;
};

class MemoryBank {
  public:
    explicit MemoryBank(std::size_t dim = kDefaultEmbeddingDim) : dim_(dim) {}

    // Write-on-success. Merges into an existing entry when task name and
    // canonical CSD content match (counts bumped, timestamp advanced); the
    // stored CSD is stamped with the given timestamp on first insert.
    std::uint64_t commit_success(const TaskRecord& record, Csd csd,
                                 const std::vector<Action>& actions, EpisodeTime timestamp);

    void log_failure(const std::string& task_name, const std::vector<Action>& actions,
                     const std::string& reason, EpisodeTime timestamp);

    // Merge same-task pairs whose uniform-weight aggregate similarity reaches
    // the threshold; earlier entry id survives. Returns removed count.
    // Idempotent. Throws std::invalid_argument if threshold is not in (0,1].
    std::size_t deduplicate(double threshold);

    // Drop entries referencing items/recipes absent from the catalog.
    std::size_t clean(const TechTree& tree);

    // Greedy leader clustering at the given threshold (uniform axis weights).
    ClusterSet cluster(double threshold) const;

    void save(const std::string& bank_path, const std::string& failures_path) const;
    static MemoryBank load(const std::string& bank_path, const std::string& failures_path);

    const std::vector<MemoryEntry>& entries() const { return entries_; }
    const std::vector<FailureRecord>& failures() const { return failures_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t dim() const { return dim_; }
    std::uint64_t next_entry_id() const { return next_entry_id_; }

    const MemoryEntry* find(std::uint64_t entry_id) const;
    const MemoryEntry* find_by_task(const std::string& task_name) const;  // best: most successes

    bool operator==(const MemoryBank&) const = default;

  private:
    std::size_t dim_;
    std::uint64_t next_entry_id_ = 1;
    std::vector<MemoryEntry> entries_;  // ascending entry_id
    std::vector<FailureRecord> failures_;
};

}  // namespace echo
