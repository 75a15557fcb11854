#pragma once
// Experiment harness: from-scratch transfer comparisons (paired seeds),
// keep-only/remove axis ablations, k-shot sweeps, and JSON/CSV emission.
// Every comparison runs both arms on identical seed lists and reports the
// seeds it used; reruns with the same flags are byte-identical.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "echo/agent.hpp"
#include "echo/ical.hpp"

namespace echo {

struct TaskFamily {
    std::string name;
    std::vector<std::string> goals;
};

// Desk-scale analogs of the four evaluation families.
const std::vector<TaskFamily>& default_families();

// The spine of the gathering -> smelting -> crafting chain.
const std::vector<std::string>& milestone_items();

// 100 * successes among the first min(n, len) episodes; empty list -> 0.
double success_at(const std::vector<EpisodeResult>& results, int n);

// First episode count (1-based) at which every milestone is unlocked,
// censored at the episode count when the run never gets there.
int episodes_to_milestones(const RunReport& report, const std::vector<std::string>& milestones);

// Largest number of unlocks inside any `window` consecutive episodes.
int max_unlocks_in_window(const RunReport& report, int window);

struct ExperimentBase {
    CurriculumConfig curriculum;
    AnalogyConfig analogy;  // builtin policy configuration
};

struct TransferComparison {
    struct SeedRow {
        std::uint64_t seed = 0;
        int on_episodes_to_milestones = 0;
        int off_episodes_to_milestones = 0;
        int on_burst = 0;   // max unlocks in any 3-episode window
        int off_burst = 0;
        RunReport on_report;
        RunReport off_report;
    };
    std::vector<SeedRow> rows;
    double mean_on = 0.0;
    double mean_off = 0.0;
    double speedup = 0.0;          // mean_off / mean_on
    double burst_win_rate = 0.0;   // fraction of seeds with on_burst > off_burst
};

TransferComparison run_transfer_comparison(const TechTree& tree, const ExperimentBase& base,
                                           const std::vector<std::uint64_t>& seeds);

struct AblationSpec {
    enum class Mode { KeepOnly, Remove };
    Mode mode = Mode::Remove;
    Axis axis = Axis::Functional;
};

// The exact weight vectors the ablations use: keep-only is the indicator,
// remove is uniform over the remaining four.
AxisWeights ablation_weights(const AblationSpec& spec);
std::array<bool, kAxisCount> ablation_licensing(const AblationSpec& spec);

struct AblationResult {
    AblationSpec spec;
    struct Row {
        std::string family;
        double base_success10 = 0.0, ablated_success10 = 0.0, delta10 = 0.0;
        double base_success30 = 0.0, ablated_success30 = 0.0, delta30 = 0.0;
    };
    std::vector<Row> rows;
    std::vector<std::uint64_t> seeds;
};

AblationResult run_ablation(const AblationSpec& spec, const TechTree& tree,
                            const ExperimentBase& base, const std::vector<std::uint64_t>& seeds);

struct KshotResult {
    struct Row {
        int k = 0;
        double success10_mean = 0.0, success10_std = 0.0;
        double success30_mean = 0.0, success30_std = 0.0;
    };
    std::vector<Row> rows;
    std::vector<std::uint64_t> seeds;
};

KshotResult run_kshot_sweep(const std::vector<int>& ks, const TechTree& tree,
                            const ExperimentBase& base, const std::vector<std::uint64_t>& seeds);

// Deterministic seed list 1..n derived from a base seed.
std::vector<std::uint64_t> seed_list(std::uint64_t base_seed, int n);

nlohmann::json comparison_to_json(const TransferComparison& c);
nlohmann::json ablation_to_json(const AblationResult& a);
nlohmann::json ksweep_to_json(const KshotResult& k);

// CSV schemas are documented in the README; emit() writes either format.
std::string comparison_to_csv(const TransferComparison& c);
std::string ablation_to_csv(const AblationResult& a);
std::string ksweep_to_csv(const KshotResult& k);
std::string unlock_series_to_csv(const RunReport& r);

void emit(const nlohmann::json& doc, const std::string& path);       // JSON
void emit_text(const std::string& text, const std::string& path);    // CSV

}  // namespace echo
