#pragma once
// The iterative loop: perception (query CSD from goal + state), retrieval,
// planning (memory reuse / analogical proposals / fallback planner),
// verification, execution, memory update. A curriculum threads one world
// state and one bank through a sequence of goal and proactive episodes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "echo/ical.hpp"
#include "echo/memory_bank.hpp"
#include "echo/retrieval.hpp"
#include "echo/world.hpp"

namespace echo {

inline constexpr const char* kProactiveGoal = "proactive";

struct EpisodeConfig {
    std::optional<std::string> goal;  // nullopt = proactive induction round
    int action_budget = 64;
    int k = 8;
    AxisWeights weights = AxisWeights::uniform();
    int replan_attempts = 1;       // extra verified candidates tried after a failure
    int maintenance_every = 10;    // episodes; 0 disables the hook
    double dedup_threshold = 0.95;
    bool transfer = true;          // off: fallback planner only, proactive rounds no-op
    int induce_budget = 4;
    SeedStrategy seed_strategy = SeedStrategy::MostSuccessful;
};

struct EpisodeResult {
    std::string goal;  // item name or "proactive"
    bool success = false;
    int steps_used = 0;
    std::vector<std::string> newly_unlocked;  // sorted
    int verifier_failures = 0;
    std::string source = "planned";  // "planned" | "transferred"
    std::optional<std::uint64_t> provenance_entry_id;
};

// Build the retrieval query for a goal in the current state: the goal's own
// defining step plus its catalog facts.
Csd goal_query_csd(const std::string& goal, const WorldState& state, const TechTree& tree,
                   std::size_t dim);

EpisodeResult run_episode(const EpisodeConfig& cfg, WorldState& state, MemoryBank& bank,
                          const TechTree& tree, const PolicyModel& policy,
                          std::int64_t episode_index);

struct UnlockPoint {
    std::int64_t step = 0;  // cumulative executed actions
    int episode = 0;
    int unlocked = 0;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::vector<EpisodeResult> episodes;
    std::vector<UnlockPoint> series;  // one point per episode end
    std::size_t final_bank_size = 0;
    int final_unlocked = 0;
};

RunReport run_curriculum(const std::vector<EpisodeConfig>& episodes, std::uint64_t seed,
                         const TechTree& tree, const PolicyModel& policy);

struct CurriculumConfig {
    int episodes = 30;
    int proactive_every = 3;  // every Nth slot is an induction round; 0 = none
    double shuffle_fraction = 0.2;
    EpisodeConfig base;  // shared knobs applied to every episode
};

// Craftable goals ordered by tech-tree depth, partially shuffled by seed,
// with proactive rounds interleaved. The schedule is identical for transfer
// on/off so paired comparisons stay paired.
std::vector<EpisodeConfig> default_curriculum(const TechTree& tree, const CurriculumConfig& cfg,
                                              std::uint64_t seed);

// Same shape over an explicit goal list (task families), cycled to length.
std::vector<EpisodeConfig> goal_curriculum(const std::vector<std::string>& goals,
                                           const CurriculumConfig& cfg, std::uint64_t seed);

nlohmann::json episode_result_to_json(const EpisodeResult& r);
nlohmann::json run_report_to_json(const RunReport& r);

}  // namespace echo
