#include "echo/ical.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace echo {

namespace {

// Hard cap on assembled plan length; longer proposals are dropped.
constexpr std::size_t kMaxPlanLength = 64;

bool is_smelting(const Recipe& r) { return r.station == "furnace"; }

ActionKind recipe_action_kind(const Recipe& r) {
    return is_smelting(r) ? ActionKind::Smelt : ActionKind::Craft;
}

}  // namespace

const MemoryEntry& select_seed_task(const MemoryBank& bank, SeedStrategy strategy) {
    if (bank.empty()) throw std::runtime_error("select_seed_task: empty bank");
    const MemoryEntry* best = nullptr;
    for (const MemoryEntry& e : bank.entries()) {
        if (best == nullptr) {
            best = &e;
            continue;
        }
        bool better = false;
        if (strategy == SeedStrategy::MostSuccessful) {
            if (e.success_count != best->success_count)
                better = e.success_count > best->success_count;
            else if (e.last_success_at != best->last_success_at)
                better = e.last_success_at > best->last_success_at;
            else
                better = e.entry_id < best->entry_id;
        } else {
            if (e.last_success_at != best->last_success_at)
                better = e.last_success_at > best->last_success_at;
            else
                better = e.entry_id < best->entry_id;
        }
        if (better) best = &e;
    }
    return *best;
}

IclContext construct_context(const MemoryEntry& seed, const RetrievalResult& result,
                             const MemoryBank& bank, const std::string& protocol_id) {
    IclContext ctx;
    ctx.seed = seed;
    ctx.protocol = protocol_id;
    for (const ScoredEntry& s : result.ranked) {
        if (s.entry_id == seed.entry_id)
            throw std::invalid_argument("construct_context: seed present in retrieval result");
        const MemoryEntry* e = bank.find(s.entry_id);
        if (e == nullptr)
            throw std::runtime_error("construct_context: dangling entry id " +
                                     std::to_string(s.entry_id));
        ctx.exemplars.push_back(*e);
        ctx.evidence.push_back(s.per_axis);
    }
    return ctx;
}

// --- licensing ---------------------------------------------------------------

namespace {

// Item-level text embeddings used only to license substitutions; these carry
// no item-name tokens, unlike the CSD axis content.
class ItemTextCache {
  public:
    ItemTextCache(const TechTree& tree, std::size_t dim) : tree_(tree), dim_(dim) {}

    const Embedding& functional(const std::string& item) {
        return get(func_, item, [&](const ItemDef& def) { return join_tokens(def.functions); });
    }
    const Embedding& attribute(const std::string& item) {
        return get(attr_, item, [&](const ItemDef& def) {
            std::vector<std::string> texts = def.attributes;
            if (!def.material_family.empty()) texts.push_back(def.material_family);
            return join_tokens(texts);
        });
    }

  private:
    static std::vector<std::string> join_tokens(const std::vector<std::string>& texts) {
        std::vector<std::string> tokens;
        for (const std::string& t : texts)
            for (std::string& tok : tokenize(t)) tokens.push_back(std::move(tok));
        return tokens;
    }

    template <typename F>
    const Embedding& get(std::map<std::string, Embedding>& cache, const std::string& item,
                         F&& tokens_of) {
        auto it = cache.find(item);
        if (it != cache.end()) return it->second;
        return cache.emplace(item, encode_text(tokens_of(tree_.item(item)), dim_)).first->second;
    }

    const TechTree& tree_;
    std::size_t dim_;
    std::map<std::string, Embedding> func_;
    std::map<std::string, Embedding> attr_;
};

std::optional<Substitution> license(const std::string& from, const std::string& to,
                                    const TechTree& tree, const AnalogyConfig& cfg,
                                    ItemTextCache& cache) {
    std::optional<Substitution> best;
    auto consider = [&](Axis axis, double sim) {
        if (!best || sim > best->similarity ||
            (sim == best->similarity && axis == Axis::Functional))
            best = Substitution{from, to, axis, sim};
    };
    if (cfg.licensing[static_cast<std::size_t>(Axis::Functional)]) {
        const double sim = cosine(cache.functional(from), cache.functional(to));
        if (sim >= cfg.functional_threshold) consider(Axis::Functional, sim);
    }
    if (cfg.licensing[static_cast<std::size_t>(Axis::Attribute)]) {
        const std::string& fa = tree.item(from).material_family;
        const std::string& fb = tree.item(to).material_family;
        if (!fa.empty() && fa == fb)
            consider(Axis::Attribute, std::max(0.0, cosine(cache.attribute(from),
                                                           cache.attribute(to))));
    }
    return best;
}

// --- plan assembly -----------------------------------------------------------

struct Synth {
    std::map<std::string, std::int64_t> inv;
    std::set<std::string> stations;

    std::int64_t count(const std::string& item) const {
        auto it = inv.find(item);
        return it == inv.end() ? 0 : it->second;
    }
};

// Lenient bookkeeping while assembling: grant outputs, consume what exists.
// The verifier is the arbiter of whether the assembled plan actually works.
void sim_apply(Synth& s, const Action& a, const TechTree& tree) {
    switch (a.kind) {
        case ActionKind::Gather:
            s.inv[a.target] += a.count;
            break;
        case ActionKind::Craft:
        case ActionKind::Smelt: {
            const Recipe* r = tree.find_recipe(a.target);
            if (r == nullptr) return;
            for (const auto& [in, n] : r->inputs) s.inv[in] = std::max<std::int64_t>(0, s.count(in) - n);
            if (a.kind == ActionKind::Smelt) {
                if (auto fuel = pick_fuel(s.inv, *r, tree)) s.inv[*fuel] -= 1;
            }
            s.inv[r->output] += r->output_count;
            break;
        }
        case ActionKind::Place:
            s.inv[a.target] = std::max<std::int64_t>(0, s.count(a.target) - 1);
            s.stations.insert(a.target);
            break;
    }
}

class PlanAssembler {
  public:
    PlanAssembler(const WorldState& state, const TechTree& tree,
                  const std::vector<const MemoryEntry*>& sources, const AnalogyConfig& cfg)
        : tree_(tree), sources_(sources), cfg_(cfg) {
        synth_.inv = state.inventory;
        synth_.stations = state.placed_stations;
    }

    std::vector<Action> take_plan() { return std::move(plan_); }
    bool overflowed() const { return overflow_; }

    void emit(Action a) {
        if (plan_.size() >= kMaxPlanLength) {
            overflow_ = true;
            return;
        }
        sim_apply(synth_, a, tree_);
        plan_.push_back(std::move(a));
    }

    // Replay a stored plan from the context (memory composition).
    void splice(const MemoryEntry& entry) {
        for (const Action& a : entry.action_sequence) emit(a);
    }

    const MemoryEntry* source_for(const std::string& task) const {
        for (const MemoryEntry* e : sources_)
            if (e->task_name == task) return e;
        return nullptr;
    }

    // Best-effort: make `count` of `item` available in the synthetic state.
    // Shallow by design — direct gathers, `depth` levels of recipe expansion,
    // and stored plans from the context; anything unresolved is left for the
    // verifier to flag.
    void acquire(const std::string& item, std::int64_t count, int depth) {
        if (synth_.count(item) >= count) return;
        const std::int64_t need = count - synth_.count(item);

        if (const GatherRule* rule = tree_.gather_rule(item)) {
            if (!rule->tools.empty() && !tool_present(*rule)) {
                if (depth > 0) {
                    for (const std::string& tool : rule->tools) {
                        if (const MemoryEntry* e = source_for(tool)) {
                            splice(*e);
                            break;
                        }
                    }
                }
            }
            emit(Action::gather(item, static_cast<int>(need)));
            return;
        }

        const Recipe* r = tree_.recipe_for_output(item);
        if (r == nullptr || depth <= 0) return;

        const std::int64_t apps = (need + r->output_count - 1) / r->output_count;
        for (const auto& [in, n] : r->inputs) acquire(in, n * apps, depth - 1);
        if (!r->station.empty() && synth_.stations.count(r->station) == 0) {
            acquire(r->station, 1, depth - 1);
            emit(Action::place(r->station));
        }
        for (std::int64_t i = 0; i < apps; ++i) {
            if (is_smelting(*r)) ensure_fuel(*r, depth - 1);
            emit(Action{recipe_action_kind(*r), r->id, 1});
        }
    }

    void ensure_fuel(const Recipe& r, int depth) {
        if (pick_fuel(synth_.inv, r, tree_)) return;
        for (const auto& [name, def] : tree_.items()) {
            if (!def.fuel) continue;
            acquire(name, synth_.count(name) + 1, depth);
            if (pick_fuel(synth_.inv, r, tree_)) return;
        }
    }

    bool station_placed(const std::string& s) const { return synth_.stations.count(s) > 0; }

  private:
    bool tool_present(const GatherRule& rule) const {
        for (const std::string& t : rule.tools)
            if (synth_.count(t) >= 1) return true;
        return false;
    }

    const TechTree& tree_;
    const std::vector<const MemoryEntry*>& sources_;
    const AnalogyConfig& cfg_;
    Synth synth_;
    std::vector<Action> plan_;
    bool overflow_ = false;
};

struct CandidateProposal {
    std::string goal;
    const Recipe* recipe = nullptr;
    Substitution substitution;
    std::uint64_t source_entry_id = 0;
    std::size_t context_pos = 0;  // 0 = seed, i+1 = exemplar i
};

}  // namespace

std::vector<TaskProposal> propose_analogical(const IclContext& ctx, const WorldState& state,
                                             const TechTree& tree, const AnalogyConfig& cfg) {
    ItemTextCache cache(tree, cfg.dim);

    std::vector<const MemoryEntry*> sources;
    sources.push_back(&ctx.seed);
    for (const MemoryEntry& e : ctx.exemplars) sources.push_back(&e);

    std::vector<CandidateProposal> candidates;
    for (std::size_t pos = 0; pos < sources.size(); ++pos) {
        const MemoryEntry& entry = *sources[pos];
        const Recipe* goal_recipe = tree.recipe_for_output(entry.task_name);
        if (goal_recipe == nullptr) continue;

        for (const auto& [from, from_count] : goal_recipe->inputs) {
            for (const auto& [to, def] : tree.items()) {
                if (to == from) continue;
                auto sub = license(from, to, tree, cfg, cache);
                if (!sub) continue;

                std::map<std::string, int> wanted = goal_recipe->inputs;
                wanted.erase(from);
                wanted[to] += from_count;

                for (const Recipe& r : tree.recipes()) {
                    if (r.output == entry.task_name || r.inputs != wanted) continue;
                    candidates.push_back({r.output, &r, *sub, entry.entry_id, pos});
                    break;
                }
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const CandidateProposal& a, const CandidateProposal& b) {
                  if (a.substitution.similarity != b.substitution.similarity)
                      return a.substitution.similarity > b.substitution.similarity;
                  if (a.goal != b.goal) return a.goal < b.goal;
                  return a.context_pos < b.context_pos;
              });

    std::vector<TaskProposal> proposals;
    std::set<std::string> seen_goals;
    for (const CandidateProposal& c : candidates) {
        if (static_cast<int>(proposals.size()) >= cfg.proposal_budget) break;
        if (!seen_goals.insert(c.goal).second) continue;

        PlanAssembler assembler(state, tree, sources, cfg);
        for (const auto& [in, n] : c.recipe->inputs) assembler.acquire(in, n, cfg.acquire_depth);
        if (!c.recipe->station.empty() && !assembler.station_placed(c.recipe->station)) {
            assembler.acquire(c.recipe->station, 1, cfg.acquire_depth - 1);
            assembler.emit(Action::place(c.recipe->station));
        }
        if (is_smelting(*c.recipe)) assembler.ensure_fuel(*c.recipe, cfg.acquire_depth - 1);
        assembler.emit(Action{recipe_action_kind(*c.recipe), c.recipe->id, 1});
        if (assembler.overflowed()) continue;

        TaskProposal p;
        p.goal_item = c.goal;
        p.plan = assembler.take_plan();
        p.asserts.push_back(Assertion::produces(c.goal, 1));
        if (!c.recipe->station.empty())
            p.asserts.push_back(Assertion::requires_station(c.recipe->station));
        p.asserts.push_back(
            Assertion::requires_item(c.substitution.to, c.recipe->inputs.at(c.substitution.to)));
        p.source_entry_id = c.source_entry_id;
        p.substitutions.push_back(c.substitution);
        proposals.push_back(std::move(p));
    }
    return proposals;
}

// --- pattern abstraction -----------------------------------------------------

namespace {

std::vector<std::string> split_name(const std::string& name) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : name) {
        if (c == '_') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string join_name(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += '_';
        out += parts[i];
    }
    return out;
}

}  // namespace

std::vector<PatternTemplate> abstract_pattern(const std::vector<std::uint64_t>& cluster,
                                              const MemoryBank& bank, const TechTree& tree,
                                              const AnalogyConfig& cfg) {
    if (cluster.size() < 2)
        throw std::invalid_argument("abstract_pattern: cluster must have at least two members");

    std::vector<const MemoryEntry*> members;
    for (std::uint64_t id : cluster) {
        const MemoryEntry* e = bank.find(id);
        if (e == nullptr)
            throw std::runtime_error("abstract_pattern: dangling entry id " + std::to_string(id));
        members.push_back(e);
    }

    const std::size_t len = members.front()->action_sequence.size();
    for (const MemoryEntry* m : members)
        if (m->action_sequence.size() != len) return {};

    ItemTextCache cache(tree, cfg.dim);

    PatternTemplate tmpl;
    // variable value-vector -> variable name, so coordinated slots unify
    std::map<std::vector<std::string>, std::string> var_names;

    for (std::size_t p = 0; p < len; ++p) {
        const Action& first = members.front()->action_sequence[p];
        bool all_equal = true;
        for (const MemoryEntry* m : members) {
            const Action& a = m->action_sequence[p];
            if (a.kind != first.kind || a.count != first.count) return {};
            if (a.target != first.target) all_equal = false;
        }
        if (all_equal) {
            tmpl.actions.push_back({first.kind, first.target, first.count});
            continue;
        }

        // Targets differ: they must differ in exactly one name part, and the
        // differing items must be mutually licensed.
        std::vector<std::vector<std::string>> parts;
        for (const MemoryEntry* m : members) parts.push_back(split_name(m->action_sequence[p].target));
        const std::size_t nparts = parts.front().size();
        for (const auto& pp : parts)
            if (pp.size() != nparts) return {};

        int varying = -1;
        for (std::size_t t = 0; t < nparts; ++t) {
            bool same = true;
            for (const auto& pp : parts)
                if (pp[t] != parts.front()[t]) same = false;
            if (!same) {
                if (varying != -1) return {};  // more than one varying part
                varying = static_cast<int>(t);
            }
        }
        if (varying == -1) return {};

        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const std::string& a = members[i]->action_sequence[p].target;
                const std::string& b = members[j]->action_sequence[p].target;
                if (a == b) continue;
                if (!tree.has_item(a) || !tree.has_item(b)) return {};
                if (!license(a, b, tree, cfg, cache)) return {};
            }
        }

        std::vector<std::string> values;
        for (const auto& pp : parts) values.push_back(pp[static_cast<std::size_t>(varying)]);

        auto it = var_names.find(values);
        if (it == var_names.end()) {
            const std::string name(1, static_cast<char>('X' + var_names.size() % 3));
            it = var_names.emplace(values, name).first;
            tmpl.variables.push_back(name);
            std::vector<std::string> uniq = values;
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            tmpl.instantiations[name] = std::move(uniq);
        }

        std::vector<std::string> pattern_parts = parts.front();
        pattern_parts[static_cast<std::size_t>(varying)] = "<" + it->second + ">";
        tmpl.actions.push_back({first.kind, join_name(pattern_parts), first.count});
    }

    if (tmpl.variables.empty()) return {};
    return {tmpl};
}

std::vector<Action> instantiate_pattern(const PatternTemplate& tmpl,
                                        const std::map<std::string, std::string>& values) {
    std::vector<Action> plan;
    for (const PatternTemplate::Slot& slot : tmpl.actions) {
        std::string target = slot.target_pattern;
        for (const auto& [var, value] : values) {
            const std::string marker = "<" + var + ">";
            std::size_t at;
            while ((at = target.find(marker)) != std::string::npos)
                target.replace(at, marker.size(), value);
        }
        plan.push_back({slot.kind, std::move(target), slot.count});
    }
    return plan;
}

// --- induce & trial ----------------------------------------------------------

std::vector<TrialRecord> induce_and_trial(MemoryBank& bank, WorldState& state,
                                          const TechTree& tree, const InduceConfig& cfg,
                                          const PolicyModel& policy, EpisodeTime now) {
    const MemoryEntry seed = select_seed_task(bank, cfg.strategy);

    RetrievalOptions opts;
    opts.k = cfg.k;
    opts.weights = cfg.weights;
    opts.exclude_task = seed.task_name;
    const RetrievalResult result = retrieve_top_k(seed.csd, bank, opts);
    const IclContext ctx = construct_context(seed, result, bank, cfg.protocol);

    std::vector<TrialRecord> trials;
    int processed = 0;
    for (TaskProposal& proposal : policy.propose(ctx, state, tree)) {
        if (processed >= cfg.budget) break;
        ++processed;

        TrialRecord trial;
        trial.report = verify(proposal.plan, proposal.asserts, state, tree);
        if (!trial.report.pass) {
            const std::string reason =
                trial.report.violations.empty() ? "unverified" : trial.report.violations.front().reason;
            bank.log_failure(proposal.goal_item, proposal.plan, reason, now);
            trial.disposition = "rejected";
        } else if (state.unlocked.count(proposal.goal_item) > 0) {
            trial.disposition = "skipped";
        } else {
            Trace trace = execute(proposal.plan, state, tree, proposal.goal_item);
            if (trace.success) {
                TaskRecord record{proposal.goal_item, proposal.plan, {}};
                Csd csd = build_csd(record, state, tree, bank.dim());
                bank.commit_success(record, std::move(csd), proposal.plan, now);
                trial.disposition = "committed";
            } else {
                std::string reason = "execution_failed";
                if (!trace.records.empty() && !trace.records.back().outcome.ok)
                    reason = trace.records.back().outcome.reason;
                bank.log_failure(proposal.goal_item, proposal.plan, reason, now);
                trial.disposition = "failed";
            }
            trial.trace = std::move(trace);
        }
        trial.proposal = std::move(proposal);
        trials.push_back(std::move(trial));
    }
    return trials;
}

}  // namespace echo
