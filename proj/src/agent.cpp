#include "echo/agent.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "echo/planner.hpp"
#include "echo/verifier.hpp"

namespace echo {

using nlohmann::json;

Csd goal_query_csd(const std::string& goal, const WorldState& state, const TechTree& tree,
                   std::size_t dim) {
    TaskRecord record;
    record.task_name = goal;
    record.items.push_back(goal);
    if (const Recipe* r = tree.recipe_for_output(goal)) {
        record.actions.push_back(
            {r->station == "furnace" ? ActionKind::Smelt : ActionKind::Craft, r->id, 1});
    } else if (tree.gatherable(goal)) {
        record.actions.push_back(Action::gather(goal, 1));
    }
    return build_csd(record, state, tree, dim);
}

namespace {

struct PlanCandidate {
    std::vector<Action> plan;
    std::uint64_t provenance = 0;
};

void commit_episode_task(MemoryBank& bank, const std::string& goal,
                         const std::vector<Action>& plan, const WorldState& state,
                         const TechTree& tree, EpisodeTime now) {
    TaskRecord record{goal, plan, {}};
    Csd csd = build_csd(record, state, tree, bank.dim());
    bank.commit_success(record, std::move(csd), plan, now);
}

EpisodeResult run_goal_episode(const EpisodeConfig& cfg, const std::string& goal,
                               WorldState& state, MemoryBank& bank, const TechTree& tree,
                               const PolicyModel& policy, EpisodeTime now) {
    EpisodeResult res;
    res.goal = goal;

    std::vector<PlanCandidate> candidates;
    if (cfg.transfer && !bank.empty()) {
        // Exact memory reuse first, then analogical proposals for this goal.
        if (const MemoryEntry* exact = bank.find_by_task(goal))
            candidates.push_back({exact->action_sequence, exact->entry_id});

        const Csd query = goal_query_csd(goal, state, tree, bank.dim());
        RetrievalOptions opts;
        opts.k = cfg.k;
        opts.weights = cfg.weights;
        const RetrievalResult retrieved = retrieve_top_k(query, bank, opts);
        if (!retrieved.ranked.empty()) {
            const MemoryEntry* seed = bank.find(retrieved.ranked.front().entry_id);
            RetrievalResult rest = retrieved;
            rest.ranked.erase(rest.ranked.begin());
            // The seed's other ranked duplicates (same task) would violate the
            // context contract; drop them.
            std::erase_if(rest.ranked, [&](const ScoredEntry& s) {
                const MemoryEntry* e = bank.find(s.entry_id);
                return e == nullptr || e->task_name == seed->task_name;
            });
            const IclContext ctx = construct_context(*seed, rest, bank);
            for (TaskProposal& p : policy.propose(ctx, state, tree)) {
                if (p.goal_item == goal) candidates.push_back({std::move(p.plan), p.source_entry_id});
            }
        }
    }

    int tries_left = 1 + cfg.replan_attempts;
    for (const PlanCandidate& cand : candidates) {
        if (tries_left <= 0) break;
        --tries_left;
        const VerificationReport report = verify(cand.plan, {}, state, tree);
        if (!report.pass) {
            res.verifier_failures += 1;
            continue;
        }
        Trace trace = execute(cand.plan, state, tree, goal);
        if (trace.success) {
            commit_episode_task(bank, goal, cand.plan, state, tree, now);
            res.success = true;
            res.source = "transferred";
            res.provenance_entry_id = cand.provenance;
            return res;
        }
        bank.log_failure(goal, cand.plan,
                         trace.records.empty() || trace.records.back().outcome.ok
                             ? "goal_not_reached"
                             : trace.records.back().outcome.reason,
                         now);
        break;  // the world changed; hand over to the planner
    }

    auto plan = plan_goal(goal, state, tree, cfg.action_budget);
    if (!plan) {
        bank.log_failure(goal, {}, "no_plan", now);
        return res;
    }
    const VerificationReport report = verify(*plan, {}, state, tree);
    if (!report.pass) {
        res.verifier_failures += 1;
        bank.log_failure(goal, *plan, report.violations.front().reason, now);
        return res;
    }
    Trace trace = execute(*plan, state, tree, goal);
    if (trace.success) {
        commit_episode_task(bank, goal, *plan, state, tree, now);
        res.success = true;
        res.source = "planned";
    } else {
        bank.log_failure(goal, *plan,
                         trace.records.empty() || trace.records.back().outcome.ok
                             ? "goal_not_reached"
                             : trace.records.back().outcome.reason,
                         now);
    }
    return res;
}

EpisodeResult run_proactive_episode(const EpisodeConfig& cfg, WorldState& state, MemoryBank& bank,
                                    const TechTree& tree, const PolicyModel& policy,
                                    EpisodeTime now) {
    EpisodeResult res;
    res.goal = kProactiveGoal;
    if (!cfg.transfer || bank.empty()) return res;

    InduceConfig icfg;
    icfg.k = cfg.k;
    icfg.weights = cfg.weights;
    icfg.strategy = cfg.seed_strategy;
    icfg.budget = cfg.induce_budget;
    const std::uint64_t seed_id = select_seed_task(bank, icfg.strategy).entry_id;

    for (const TrialRecord& trial : induce_and_trial(bank, state, tree, icfg, policy, now)) {
        if (trial.disposition == "rejected") res.verifier_failures += 1;
        if (trial.disposition == "committed") res.success = true;
    }
    if (res.success) {
        res.source = "transferred";
        res.provenance_entry_id = seed_id;
    }
    return res;
}

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& cfg, WorldState& state, MemoryBank& bank,
                          const TechTree& tree, const PolicyModel& policy,
                          std::int64_t episode_index) {
    const EpisodeTime now{episode_index, state.episode_step};
    const std::set<std::string> unlocked_before = state.unlocked;
    const std::int64_t steps_before = state.episode_step;

    EpisodeResult res = cfg.goal
                            ? run_goal_episode(cfg, *cfg.goal, state, bank, tree, policy, now)
                            : run_proactive_episode(cfg, state, bank, tree, policy, now);

    res.steps_used = static_cast<int>(state.episode_step - steps_before);
    for (const std::string& item : state.unlocked)
        if (unlocked_before.count(item) == 0) res.newly_unlocked.push_back(item);

    if (cfg.maintenance_every > 0 && episode_index > 0 &&
        episode_index % cfg.maintenance_every == 0) {
        bank.deduplicate(cfg.dedup_threshold);
        bank.clean(tree);
    }
    return res;
}

RunReport run_curriculum(const std::vector<EpisodeConfig>& episodes, std::uint64_t seed,
                         const TechTree& tree, const PolicyModel& policy) {
    RunReport report;
    report.seed = seed;
    WorldState state;
    state.rng_seed = seed;
    MemoryBank bank;

    for (std::size_t i = 0; i < episodes.size(); ++i) {
        report.episodes.push_back(
            run_episode(episodes[i], state, bank, tree, policy, static_cast<std::int64_t>(i)));
        report.series.push_back(
            {state.episode_step, static_cast<int>(i), unlocked_count(state)});
    }
    report.final_bank_size = bank.size();
    report.final_unlocked = unlocked_count(state);
    return report;
}

namespace {

std::vector<std::string> craftable_goals_by_depth(const TechTree& tree) {
    std::vector<std::string> goals;
    for (const Recipe& r : tree.recipes())
        if (std::find(goals.begin(), goals.end(), r.output) == goals.end())
            goals.push_back(r.output);
    std::sort(goals.begin(), goals.end(), [&](const std::string& a, const std::string& b) {
        const int da = tree.depth(a), db = tree.depth(b);
        if (da != db) return da < db;
        return a < b;
    });
    return goals;
}

std::vector<EpisodeConfig> schedule(std::vector<std::string> goals, const CurriculumConfig& cfg,
                                    std::uint64_t seed) {
    if (cfg.shuffle_fraction > 0.0 && goals.size() > 1) {
        std::mt19937_64 rng(seed);
        const std::size_t swaps =
            static_cast<std::size_t>(cfg.shuffle_fraction * static_cast<double>(goals.size()));
        for (std::size_t s = 0; s < swaps; ++s) {
            const std::size_t i = rng() % goals.size();
            const std::size_t j = rng() % goals.size();
            std::swap(goals[i], goals[j]);
        }
    }

    std::vector<EpisodeConfig> episodes;
    std::size_t next_goal = 0;
    for (int slot = 0; slot < cfg.episodes; ++slot) {
        EpisodeConfig e = cfg.base;
        const bool proactive =
            cfg.proactive_every > 0 && (slot % cfg.proactive_every) == cfg.proactive_every - 1;
        if (proactive || goals.empty()) {
            e.goal = std::nullopt;
        } else {
            e.goal = goals[next_goal % goals.size()];
            ++next_goal;
        }
        episodes.push_back(std::move(e));
    }
    return episodes;
}

}  // namespace

std::vector<EpisodeConfig> default_curriculum(const TechTree& tree, const CurriculumConfig& cfg,
                                              std::uint64_t seed) {
    return schedule(craftable_goals_by_depth(tree), cfg, seed);
}

std::vector<EpisodeConfig> goal_curriculum(const std::vector<std::string>& goals,
                                           const CurriculumConfig& cfg, std::uint64_t seed) {
    return schedule(goals, cfg, seed);
}

json episode_result_to_json(const EpisodeResult& r) {
    json j{{"goal", r.goal},
           {"success", r.success},
           {"steps_used", r.steps_used},
           {"newly_unlocked", r.newly_unlocked},
           {"verifier_failures", r.verifier_failures},
           {"source", r.source}};
    if (r.provenance_entry_id) j["provenance_entry_id"] = *r.provenance_entry_id;
    return j;
}

json run_report_to_json(const RunReport& r) {
    json episodes = json::array();
    for (const EpisodeResult& e : r.episodes) episodes.push_back(episode_result_to_json(e));
    json series = json::array();
    for (const UnlockPoint& p : r.series)
        series.push_back({{"step", p.step}, {"episode", p.episode}, {"unlocked", p.unlocked}});
    return json{{"seed", r.seed},
                {"episodes", episodes},
                {"unlock_series", series},
                {"final_bank_size", r.final_bank_size},
                {"final_unlocked", r.final_unlocked}};
}

}  // namespace echo
