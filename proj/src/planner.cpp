#include "echo/planner.hpp"

#include <map>
#include <set>

namespace echo {

namespace {

struct PlanCtx {
    const TechTree& tree;
    int max_actions;
    std::map<std::string, std::int64_t> inv;
    std::set<std::string> stations;
    std::vector<Action> plan;
    std::set<std::string> visiting;  // cycle guard along the current chain

    std::int64_t count(const std::string& item) const {
        auto it = inv.find(item);
        return it == inv.end() ? 0 : it->second;
    }

    bool emit(Action a) {
        if (static_cast<int>(plan.size()) >= max_actions) return false;
        plan.push_back(std::move(a));
        return true;
    }
};

struct Snapshot {
    std::map<std::string, std::int64_t> inv;
    std::set<std::string> stations;
    std::size_t plan_len;
};

Snapshot snap(const PlanCtx& c) { return {c.inv, c.stations, c.plan.size()}; }

void restore(PlanCtx& c, const Snapshot& s) {
    c.inv = s.inv;
    c.stations = s.stations;
    c.plan.resize(s.plan_len);
}

bool ensure(PlanCtx& c, const std::string& item, std::int64_t count);

bool ensure_tool(PlanCtx& c, const GatherRule& rule) {
    if (rule.tools.empty()) return true;
    for (const std::string& t : rule.tools)
        if (c.count(t) >= 1) return true;
    for (const std::string& t : rule.tools) {
        const Snapshot s = snap(c);
        if (ensure(c, t, 1)) return true;
        restore(c, s);
    }
    return false;
}

bool ensure_fuel(PlanCtx& c, const Recipe& recipe) {
    if (pick_fuel(c.inv, recipe, c.tree)) return true;
    for (const auto& [name, def] : c.tree.items()) {
        if (!def.fuel) continue;
        const Snapshot s = snap(c);
        if (ensure(c, name, c.count(name) + 1) && pick_fuel(c.inv, recipe, c.tree)) return true;
        restore(c, s);
    }
    return false;
}

bool ensure_via_recipe(PlanCtx& c, const Recipe& r, std::int64_t need) {
    const std::int64_t apps = (need + r.output_count - 1) / r.output_count;

    // Ensuring one input can consume another (sticks eat planks), so top up
    // until all inputs are simultaneously covered. Each round only adds
    // stock; the round cap bounds pathological trees.
    bool covered = false;
    for (int round = 0; round < 8 && !covered; ++round) {
        covered = true;
        for (const auto& [in, n] : r.inputs) {
            if (c.count(in) < n * apps) {
                covered = false;
                if (!ensure(c, in, n * apps)) return false;
            }
        }
    }
    if (!covered) {
        for (const auto& [in, n] : r.inputs)
            if (c.count(in) < n * apps) return false;
    }

    if (!r.station.empty() && c.stations.count(r.station) == 0) {
        if (!ensure(c, r.station, 1)) return false;
        if (!c.emit(Action::place(r.station))) return false;
        c.inv[r.station] -= 1;
        c.stations.insert(r.station);
    }

    const bool smelt = r.station == "furnace";
    for (std::int64_t i = 0; i < apps; ++i) {
        std::optional<std::string> fuel;
        if (smelt) {
            if (!ensure_fuel(c, r)) return false;
            fuel = pick_fuel(c.inv, r, c.tree);
        }
        if (!c.emit(Action{smelt ? ActionKind::Smelt : ActionKind::Craft, r.id, 1})) return false;
        for (const auto& [in, n] : r.inputs) c.inv[in] -= n;
        if (fuel) c.inv[*fuel] -= 1;
        c.inv[r.output] += r.output_count;
    }
    return true;
}

bool ensure(PlanCtx& c, const std::string& item, std::int64_t count) {
    if (c.count(item) >= count) return true;
    if (c.visiting.count(item)) return false;
    c.visiting.insert(item);
    bool ok = false;

    if (const GatherRule* rule = c.tree.gather_rule(item)) {
        if (ensure_tool(c, *rule)) {
            const std::int64_t need = count - c.count(item);  // tool chain may have gathered some
            if (need <= 0) {
                ok = true;
            } else if (c.emit(Action::gather(item, static_cast<int>(need)))) {
                c.inv[item] += need;
                ok = true;
            }
        }
    } else if (const Recipe* r = c.tree.recipe_for_output(item)) {
        ok = ensure_via_recipe(c, *r, count - c.count(item));
    }

    c.visiting.erase(item);
    return ok;
}

}  // namespace

std::optional<std::vector<Action>> plan_goal(const std::string& goal, const WorldState& state,
                                             const TechTree& tree, int max_actions) {
    if (!tree.has_item(goal)) return std::nullopt;
    PlanCtx ctx{tree, max_actions, state.inventory, state.placed_stations, {}, {}};
    // One more unit than currently held, so the episode actually produces the
    // goal rather than declaring victory on old stock.
    if (!ensure(ctx, goal, ctx.count(goal) + 1)) return std::nullopt;
    if (ctx.plan.empty()) return std::nullopt;
    return ctx.plan;
}

}  // namespace echo
