#include "echo/experiments.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace echo {

using nlohmann::json;

const std::vector<TaskFamily>& default_families() {
    static const std::vector<TaskFamily> families = {
        {"recipe", {"bed", "iron_pickaxe", "shield"}},
        {"functional_eq", {"gold_ingot", "gold_sword", "gold_pickaxe"}},
        {"crafting_chain",
         {"wooden_sword", "stone_sword", "iron_sword", "stone_pickaxe", "stone_shovel",
          "stone_hoe", "iron_helmet", "iron_chestplate", "iron_leggings", "iron_boots"}},
        {"utility", {"stick", "crafting_table", "furnace"}},
    };
    return families;
}

const std::vector<std::string>& milestone_items() {
    static const std::vector<std::string> milestones = {
        "stone_pickaxe", "furnace", "iron_ingot", "iron_pickaxe", "iron_sword"};
    return milestones;
}

double success_at(const std::vector<EpisodeResult>& results, int n) {
    if (n < 1) throw std::invalid_argument("success_at: n must be >= 1");
    const int len = std::min<int>(n, static_cast<int>(results.size()));
    if (len == 0) return 0.0;
    int ok = 0;
    for (int i = 0; i < len; ++i)
        if (results[static_cast<std::size_t>(i)].success) ++ok;
    return 100.0 * ok / len;
}

int episodes_to_milestones(const RunReport& report, const std::vector<std::string>& milestones) {
    std::set<std::string> pending(milestones.begin(), milestones.end());
    for (std::size_t i = 0; i < report.episodes.size(); ++i) {
        for (const std::string& item : report.episodes[i].newly_unlocked) pending.erase(item);
        if (pending.empty()) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(report.episodes.size());
}

int max_unlocks_in_window(const RunReport& report, int window) {
    int best = 0;
    const int n = static_cast<int>(report.episodes.size());
    for (int start = 0; start < n; ++start) {
        int sum = 0;
        for (int i = start; i < std::min(n, start + window); ++i)
            sum += static_cast<int>(report.episodes[static_cast<std::size_t>(i)].newly_unlocked.size());
        best = std::max(best, sum);
    }
    return best;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base_seed, int n) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < n; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
    return seeds;
}

namespace {

// Jobs write into their own slots, so the fold over results is deterministic
// regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

RunReport run_default(const TechTree& tree, const ExperimentBase& base, std::uint64_t seed,
                      bool transfer) {
    CurriculumConfig cfg = base.curriculum;
    cfg.base.transfer = transfer;
    AnalogyConfig acfg = base.analogy;
    const BuiltinPolicy policy(acfg);
    return run_curriculum(default_curriculum(tree, cfg, seed), seed, tree, policy);
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

TransferComparison run_transfer_comparison(const TechTree& tree, const ExperimentBase& base,
                                           const std::vector<std::uint64_t>& seeds) {
    TransferComparison out;
    out.rows.resize(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        TransferComparison::SeedRow& row = out.rows[i];
        row.seed = seeds[i];
        row.on_report = run_default(tree, base, seeds[i], /*transfer=*/true);
        row.off_report = run_default(tree, base, seeds[i], /*transfer=*/false);
        row.on_episodes_to_milestones = episodes_to_milestones(row.on_report, milestone_items());
        row.off_episodes_to_milestones = episodes_to_milestones(row.off_report, milestone_items());
        row.on_burst = max_unlocks_in_window(row.on_report, 3);
        row.off_burst = max_unlocks_in_window(row.off_report, 3);
    });

    std::vector<double> on, off;
    int burst_wins = 0;
    for (const auto& row : out.rows) {
        on.push_back(row.on_episodes_to_milestones);
        off.push_back(row.off_episodes_to_milestones);
        if (row.on_burst > row.off_burst) ++burst_wins;
    }
    out.mean_on = mean_of(on);
    out.mean_off = mean_of(off);
    out.speedup = out.mean_on > 0.0 ? out.mean_off / out.mean_on : 0.0;
    out.burst_win_rate = seeds.empty() ? 0.0 : static_cast<double>(burst_wins) / seeds.size();
    return out;
}

AxisWeights ablation_weights(const AblationSpec& spec) {
    return spec.mode == AblationSpec::Mode::KeepOnly ? AxisWeights::keep_only(spec.axis)
                                                     : AxisWeights::remove(spec.axis);
}

std::array<bool, kAxisCount> ablation_licensing(const AblationSpec& spec) {
    std::array<bool, kAxisCount> mask{};
    if (spec.mode == AblationSpec::Mode::KeepOnly) {
        mask.fill(false);
        mask[static_cast<std::size_t>(spec.axis)] = true;
    } else {
        mask.fill(true);
        mask[static_cast<std::size_t>(spec.axis)] = false;
    }
    return mask;
}

AblationResult run_ablation(const AblationSpec& spec, const TechTree& tree,
                            const ExperimentBase& base, const std::vector<std::uint64_t>& seeds) {
    AblationResult out;
    out.spec = spec;
    out.seeds = seeds;

    const std::vector<TaskFamily>& families = default_families();
    struct Cell {
        double base10 = 0.0, base30 = 0.0, abl10 = 0.0, abl30 = 0.0;
    };
    std::vector<Cell> cells(families.size() * seeds.size());

    parallel_for(cells.size(), [&](std::size_t idx) {
        const std::size_t fi = idx / seeds.size();
        const std::size_t si = idx % seeds.size();
        const TaskFamily& family = families[fi];
        const std::uint64_t seed = seeds[si];

        CurriculumConfig ccfg = base.curriculum;
        AnalogyConfig acfg = base.analogy;

        const BuiltinPolicy baseline(acfg);
        const RunReport base_report =
            run_curriculum(goal_curriculum(family.goals, ccfg, seed), seed, tree, baseline);

        CurriculumConfig abl_ccfg = ccfg;
        abl_ccfg.base.weights = ablation_weights(spec);
        AnalogyConfig abl_acfg = acfg;
        abl_acfg.licensing = ablation_licensing(spec);
        const BuiltinPolicy ablated(abl_acfg);
        const RunReport abl_report =
            run_curriculum(goal_curriculum(family.goals, abl_ccfg, seed), seed, tree, ablated);

        Cell& c = cells[idx];
        c.base10 = success_at(base_report.episodes, 10);
        c.base30 = success_at(base_report.episodes, 30);
        c.abl10 = success_at(abl_report.episodes, 10);
        c.abl30 = success_at(abl_report.episodes, 30);
    });

    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        std::vector<double> b10, b30, a10, a30;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const Cell& c = cells[fi * seeds.size() + si];
            b10.push_back(c.base10);
            b30.push_back(c.base30);
            a10.push_back(c.abl10);
            a30.push_back(c.abl30);
        }
        AblationResult::Row row;
        row.family = families[fi].name;
        row.base_success10 = mean_of(b10);
        row.ablated_success10 = mean_of(a10);
        row.delta10 = row.ablated_success10 - row.base_success10;
        row.base_success30 = mean_of(b30);
        row.ablated_success30 = mean_of(a30);
        row.delta30 = row.ablated_success30 - row.base_success30;
        out.rows.push_back(std::move(row));
    }
    return out;
}

KshotResult run_kshot_sweep(const std::vector<int>& ks, const TechTree& tree,
                            const ExperimentBase& base, const std::vector<std::uint64_t>& seeds) {
    if (ks.empty()) throw std::invalid_argument("run_kshot_sweep: ks must be non-empty");
    KshotResult out;
    out.seeds = seeds;

    std::vector<std::vector<double>> s10(ks.size(), std::vector<double>(seeds.size(), 0.0));
    std::vector<std::vector<double>> s30(ks.size(), std::vector<double>(seeds.size(), 0.0));

    parallel_for(ks.size() * seeds.size(), [&](std::size_t idx) {
        const std::size_t ki = idx / seeds.size();
        const std::size_t si = idx % seeds.size();
        CurriculumConfig ccfg = base.curriculum;
        ccfg.base.k = ks[ki];
        const BuiltinPolicy policy(base.analogy);
        const RunReport report =
            run_curriculum(default_curriculum(tree, ccfg, seeds[si]), seeds[si], tree, policy);
        s10[ki][si] = success_at(report.episodes, 10);
        s30[ki][si] = success_at(report.episodes, 30);
    });

    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        KshotResult::Row row;
        row.k = ks[ki];
        row.success10_mean = mean_of(s10[ki]);
        row.success10_std = std_of(s10[ki]);
        row.success30_mean = mean_of(s30[ki]);
        row.success30_std = std_of(s30[ki]);
        out.rows.push_back(row);
    }
    return out;
}

// --- emission ----------------------------------------------------------------

json comparison_to_json(const TransferComparison& c) {
    json rows = json::array();
    for (const auto& r : c.rows) {
        rows.push_back({{"seed", r.seed},
                        {"on_episodes_to_milestones", r.on_episodes_to_milestones},
                        {"off_episodes_to_milestones", r.off_episodes_to_milestones},
                        {"on_burst", r.on_burst},
                        {"off_burst", r.off_burst},
                        {"on_report", run_report_to_json(r.on_report)},
                        {"off_report", run_report_to_json(r.off_report)}});
    }
    return json{{"per_seed", rows},
                {"mean_on", c.mean_on},
                {"mean_off", c.mean_off},
                {"speedup", c.speedup},
                {"burst_win_rate", c.burst_win_rate}};
}

json ablation_to_json(const AblationResult& a) {
    json rows = json::array();
    for (const auto& r : a.rows) {
        rows.push_back({{"family", r.family},
                        {"base_success10", r.base_success10},
                        {"ablated_success10", r.ablated_success10},
                        {"delta10", r.delta10},
                        {"base_success30", r.base_success30},
                        {"ablated_success30", r.ablated_success30},
                        {"delta30", r.delta30}});
    }
    return json{{"mode", a.spec.mode == AblationSpec::Mode::KeepOnly ? "keep_only" : "remove"},
                {"axis", axis_name(a.spec.axis)},
                {"rows", rows},
                {"seeds", a.seeds}};
}

json ksweep_to_json(const KshotResult& k) {
    json rows = json::array();
    for (const auto& r : k.rows) {
        rows.push_back({{"k", r.k},
                        {"success10_mean", r.success10_mean},
                        {"success10_std", r.success10_std},
                        {"success30_mean", r.success30_mean},
                        {"success30_std", r.success30_std}});
    }
    return json{{"rows", rows}, {"seeds", k.seeds}};
}

namespace {
std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}
}  // namespace

std::string comparison_to_csv(const TransferComparison& c) {
    std::string out =
        "seed,on_episodes_to_milestones,off_episodes_to_milestones,on_burst,off_burst\n";
    for (const auto& r : c.rows) {
        out += std::to_string(r.seed) + "," + std::to_string(r.on_episodes_to_milestones) + "," +
               std::to_string(r.off_episodes_to_milestones) + "," + std::to_string(r.on_burst) +
               "," + std::to_string(r.off_burst) + "\n";
    }
    return out;
}

std::string ablation_to_csv(const AblationResult& a) {
    std::string out =
        "mode,axis,family,base_success10,ablated_success10,delta10,base_success30,"
        "ablated_success30,delta30\n";
    const std::string mode = a.spec.mode == AblationSpec::Mode::KeepOnly ? "keep_only" : "remove";
    for (const auto& r : a.rows) {
        out += mode + "," + axis_name(a.spec.axis) + "," + r.family + "," + fmt(r.base_success10) +
               "," + fmt(r.ablated_success10) + "," + fmt(r.delta10) + "," +
               fmt(r.base_success30) + "," + fmt(r.ablated_success30) + "," + fmt(r.delta30) +
               "\n";
    }
    return out;
}

std::string ksweep_to_csv(const KshotResult& k) {
    std::string out = "k,success10_mean,success10_std,success30_mean,success30_std\n";
    for (const auto& r : k.rows) {
        out += std::to_string(r.k) + "," + fmt(r.success10_mean) + "," + fmt(r.success10_std) +
               "," + fmt(r.success30_mean) + "," + fmt(r.success30_std) + "\n";
    }
    return out;
}

std::string unlock_series_to_csv(const RunReport& r) {
    std::string out = "step,episode,unlocked_count\n";
    for (const UnlockPoint& p : r.series) {
        out += std::to_string(p.step) + "," + std::to_string(p.episode) + "," +
               std::to_string(p.unlocked) + "\n";
    }
    return out;
}

void emit(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << doc.dump(2) << "\n";
}

void emit_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << text;
}

}  // namespace echo
