#include "echo/world.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace echo {

using nlohmann::json;

const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::Gather: return "gather";
        case ActionKind::Craft: return "craft";
        case ActionKind::Smelt: return "smelt";
        case ActionKind::Place: return "place";
    }
    return "?";
}

std::optional<ActionKind> action_kind_from_name(std::string_view s) {
    if (s == "gather") return ActionKind::Gather;
    if (s == "craft") return ActionKind::Craft;
    if (s == "smelt") return ActionKind::Smelt;
    if (s == "place") return ActionKind::Place;
    return std::nullopt;
}

std::string action_to_text(const Action& a) {
    switch (a.kind) {
        case ActionKind::Gather:
            return "GATHER " + a.target + " " + std::to_string(a.count);
        case ActionKind::Craft: return "CRAFT " + a.target;
        case ActionKind::Smelt: return "SMELT " + a.target;
        case ActionKind::Place: return "PLACE " + a.target;
    }
    return {};
}

std::optional<Action> action_from_text(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string verb, target;
    if (!(in >> verb >> target)) return std::nullopt;
    if (verb == "GATHER") {
        long long n = 0;
        std::string extra;
        if (!(in >> n) || n < 1 || (in >> extra)) return std::nullopt;
        return Action::gather(target, static_cast<int>(n));
    }
    std::string extra;
    if (in >> extra) return std::nullopt;
    if (verb == "CRAFT") return Action::craft(target);
    if (verb == "SMELT") return Action::smelt(target);
    if (verb == "PLACE") return Action::place(target);
    return std::nullopt;
}

// --- tech tree -------------------------------------------------------------

const ItemDef& TechTree::item(const std::string& name) const {
    auto it = items_.find(name);
    if (it == items_.end()) throw std::invalid_argument("unknown item: " + name);
    return it->second;
}

const Recipe* TechTree::find_recipe(const std::string& id) const {
    auto it = recipe_index_.find(id);
    return it == recipe_index_.end() ? nullptr : &recipes_[it->second];
}

const Recipe* TechTree::recipe_for_output(const std::string& item) const {
    auto it = output_index_.find(item);
    return it == output_index_.end() ? nullptr : &recipes_[it->second];
}

const GatherRule* TechTree::gather_rule(const std::string& resource) const {
    auto it = gather_rules_.find(resource);
    return it == gather_rules_.end() ? nullptr : &it->second;
}

TechTree TechTree::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tech tree file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("tech tree parse error in " + path + ": " + e.what());
    }
    return from_json(doc);
}

TechTree TechTree::from_json(const json& doc) {
    TechTree tree;
    tree.name_ = doc.value("name", "unnamed");
    for (const json& it : doc.at("items")) {
        ItemDef def;
        def.name = it.at("name").get<std::string>();
        def.attributes = it.value("attributes", std::vector<std::string>{});
        def.functions = it.value("functions", std::vector<std::string>{});
        def.material_family = it.value("material_family", "");
        def.fuel = it.value("fuel", false);
        if (tree.items_.count(def.name))
            throw std::runtime_error("tech tree: duplicate item " + def.name);
        tree.items_[def.name] = std::move(def);
    }
    for (const json& r : doc.at("recipes")) {
        Recipe rec;
        rec.id = r.at("id").get<std::string>();
        for (auto& [k, v] : r.at("inputs").items()) rec.inputs[k] = v.get<int>();
        rec.output = r.at("output").get<std::string>();
        rec.output_count = r.value("output_count", 1);
        rec.station = r.value("station", "");
        rec.grid = r.value("grid", "1x1");
        if (tree.recipe_index_.count(rec.id))
            throw std::runtime_error("tech tree: duplicate recipe id " + rec.id);
        tree.recipe_index_[rec.id] = tree.recipes_.size();
        if (!tree.output_index_.count(rec.output))
            tree.output_index_[rec.output] = tree.recipes_.size();
        tree.recipes_.push_back(std::move(rec));
    }
    for (const json& g : doc.at("gather_rules")) {
        GatherRule rule;
        rule.resource = g.at("resource").get<std::string>();
        rule.tools = g.value("tools", std::vector<std::string>{});
        tree.gather_rules_[rule.resource] = std::move(rule);
    }
    tree.validate();
    return tree;
}

void TechTree::validate() const {
    auto require_item = [&](const std::string& name, const std::string& where) {
        if (!items_.count(name))
            throw std::runtime_error("tech tree: " + where + " references unknown item " + name);
    };
    for (const Recipe& r : recipes_) {
        require_item(r.output, "recipe " + r.id);
        if (r.inputs.empty()) throw std::runtime_error("tech tree: recipe " + r.id + " has no inputs");
        if (r.output_count < 1)
            throw std::runtime_error("tech tree: recipe " + r.id + " has non-positive output count");
        for (const auto& [in, n] : r.inputs) {
            require_item(in, "recipe " + r.id);
            if (n < 1) throw std::runtime_error("tech tree: recipe " + r.id + " input count < 1");
        }
        if (!r.station.empty()) require_item(r.station, "recipe " + r.id + " station");
    }
    for (const auto& [res, rule] : gather_rules_) {
        require_item(res, "gather rule");
        for (const std::string& t : rule.tools) require_item(t, "gather rule for " + res);
    }
    for (const auto& [name, def] : items_) {
        for (const std::string& a : def.attributes)
            if (a.empty()) throw std::runtime_error("tech tree: empty attribute on " + name);
        for (const std::string& f : def.functions)
            if (f.empty()) throw std::runtime_error("tech tree: empty function on " + name);
    }

    // Acyclicity over item -> recipe-input edges.
    enum class Mark { White, Grey, Black };
    std::map<std::string, Mark> marks;
    std::function<void(const std::string&)> visit = [&](const std::string& item) {
        Mark& m = marks[item];
        if (m == Mark::Black) return;
        if (m == Mark::Grey)
            throw std::runtime_error("tech tree: recipe cycle through item " + item);
        m = Mark::Grey;
        if (const Recipe* r = recipe_for_output(item)) {
            for (const auto& [in, n] : r->inputs) visit(in);
        }
        marks[item] = Mark::Black;
    };
    for (const auto& [name, def] : items_) visit(name);
}

int TechTree::depth(const std::string& item) const {
    std::map<std::string, int> memo;
    std::function<int(const std::string&)> rec = [&](const std::string& it) -> int {
        auto found = memo.find(it);
        if (found != memo.end()) return found->second;
        memo[it] = 0;  // cycle guard; tree is validated acyclic anyway
        int d = 0;
        if (const Recipe* r = recipe_for_output(it)) {
            for (const auto& [in, n] : r->inputs) d = std::max(d, rec(in) + 1);
            if (!r->station.empty()) d = std::max(d, rec(r->station) + 1);
        } else if (const GatherRule* g = gather_rule(it)) {
            if (!g->tools.empty()) d = std::max(d, rec(g->tools.front()) + 1);
        }
        memo[it] = d;
        return d;
    };
    return rec(item);
}

// --- stepping --------------------------------------------------------------

std::optional<std::string> pick_fuel(const std::map<std::string, std::int64_t>& inventory,
                                     const Recipe& recipe, const TechTree& tree) {
    // Reserve the recipe inputs first so an input item cannot double as fuel.
    std::map<std::string, std::int64_t> left = inventory;
    for (const auto& [in, n] : recipe.inputs) left[in] -= n;
    for (const auto& [item, count] : left) {
        if (count >= 1 && tree.has_item(item) && tree.item(item).fuel) return item;
    }
    return std::nullopt;
}

namespace {

void add_item(WorldState& state, StepRecord& rec, const std::string& item, std::int64_t n) {
    state.inventory[item] += n;
    rec.inventory_delta[item] += n;
    if (state.unlocked.insert(item).second) rec.newly_unlocked.push_back(item);
}

void remove_item(WorldState& state, StepRecord& rec, const std::string& item, std::int64_t n) {
    state.inventory[item] -= n;
    rec.inventory_delta[item] -= n;
}

StepOutcome apply(WorldState& state, const Action& a, const TechTree& tree, StepRecord& rec) {
    switch (a.kind) {
        case ActionKind::Gather: {
            const GatherRule* rule = tree.gather_rule(a.target);
            if (rule == nullptr || a.count < 1)
                return StepOutcome::failure(fail_reason::unknown_action_target);
            if (!rule->tools.empty()) {
                bool have = false;
                for (const std::string& t : rule->tools)
                    if (state.count(t) >= 1) { have = true; break; }
                if (!have) return StepOutcome::failure(fail_reason::missing_tool);
            }
            add_item(state, rec, a.target, a.count);
            return StepOutcome::success();
        }
        case ActionKind::Craft:
        case ActionKind::Smelt: {
            const Recipe* r = tree.find_recipe(a.target);
            if (r == nullptr) return StepOutcome::failure(fail_reason::unknown_action_target);
            if (!r->station.empty() && !state.placed_stations.count(r->station))
                return StepOutcome::failure(fail_reason::missing_station);
            for (const auto& [in, n] : r->inputs)
                if (state.count(in) < n) return StepOutcome::failure(fail_reason::missing_inputs);
            std::optional<std::string> fuel;
            if (a.kind == ActionKind::Smelt) {
                fuel = pick_fuel(state.inventory, *r, tree);
                if (!fuel) return StepOutcome::failure(fail_reason::missing_fuel);
            }
            for (const auto& [in, n] : r->inputs) remove_item(state, rec, in, n);
            if (fuel) remove_item(state, rec, *fuel, 1);
            add_item(state, rec, r->output, r->output_count);
            return StepOutcome::success();
        }
        case ActionKind::Place: {
            if (!tree.has_item(a.target))
                return StepOutcome::failure(fail_reason::unknown_action_target);
            if (state.count(a.target) < 1)
                return StepOutcome::failure(fail_reason::missing_inputs);
            remove_item(state, rec, a.target, 1);
            state.placed_stations.insert(a.target);
            return StepOutcome::success();
        }
    }
    return StepOutcome::failure(fail_reason::unknown_action_target);
}

}  // namespace

StepOutcome step(WorldState& state, const Action& action, const TechTree& tree) {
    StepRecord scratch;
    StepOutcome out = apply(state, action, tree, scratch);
    state.episode_step += 1;
    return out;
}

Trace execute(const std::vector<Action>& plan, WorldState& state, const TechTree& tree,
              const std::string& goal) {
    Trace trace;
    for (const Action& a : plan) {
        StepRecord rec;
        rec.action = a;
        rec.outcome = apply(state, a, tree, rec);
        state.episode_step += 1;
        trace.steps_used += 1;
        const bool failed = !rec.outcome.ok;
        trace.records.push_back(std::move(rec));
        if (failed) {
            trace.success = false;
            return trace;
        }
    }
    trace.success = state.count(goal) >= 1;
    return trace;
}

int unlocked_count(const WorldState& state) {
    return static_cast<int>(state.unlocked.size());
}

// --- JSON ------------------------------------------------------------------

json action_to_json(const Action& a) {
    json j{{"kind", action_kind_name(a.kind)}, {"target", a.target}};
    if (a.kind == ActionKind::Gather) j["count"] = a.count;
    return j;
}

Action action_from_json(const json& j) {
    auto kind = action_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("bad action kind: " + j.at("kind").dump());
    Action a;
    a.kind = *kind;
    a.target = j.at("target").get<std::string>();
    a.count = j.value("count", 1);
    return a;
}

json state_to_json(const WorldState& s) {
    return json{{"inventory", s.inventory},
                {"placed_stations", s.placed_stations},
                {"unlocked", s.unlocked},
                {"episode_step", s.episode_step},
                {"rng_seed", s.rng_seed}};
}

WorldState state_from_json(const json& j) {
    WorldState s;
    s.inventory = j.value("inventory", std::map<std::string, std::int64_t>{});
    for (const auto& v : j.value("placed_stations", std::vector<std::string>{}))
        s.placed_stations.insert(v);
    for (const auto& v : j.value("unlocked", std::vector<std::string>{})) s.unlocked.insert(v);
    s.episode_step = j.value("episode_step", std::int64_t{0});
    s.rng_seed = j.value("rng_seed", std::uint64_t{0});
    return s;
}

}  // namespace echo
