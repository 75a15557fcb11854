#pragma once
// Deterministic crafting world: an item/recipe/gather-rule catalog (the tech
// tree) and a single-step transition kernel over inventories, placed stations
// and the unlocked-item set. Resources are unboundedly gatherable; the only
// gates are tools, stations, recipe inputs and smelting fuel.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace echo {

enum class ActionKind { Gather, Craft, Smelt, Place };

const char* action_kind_name(ActionKind k);
std::optional<ActionKind> action_kind_from_name(std::string_view s);

struct Action {
    ActionKind kind = ActionKind::Gather;
    std::string target;  // resource, recipe id, or station item
    int count = 1;       // Gather only

    bool operator==(const Action&) const = default;

    static Action gather(std::string resource, int count) {
        return {ActionKind::Gather, std::move(resource), count};
    }
    static Action craft(std::string recipe) { return {ActionKind::Craft, std::move(recipe), 1}; }
    static Action smelt(std::string recipe) { return {ActionKind::Smelt, std::move(recipe), 1}; }
    static Action place(std::string station) { return {ActionKind::Place, std::move(station), 1}; }
};

std::string action_to_text(const Action& a);                    // "GATHER oak_log 3"
std::optional<Action> action_from_text(std::string_view line);  // nullopt if malformed

struct ItemDef {
    std::string name;
    std::vector<std::string> attributes;
    std::vector<std::string> functions;
    std::string material_family;
    bool fuel = false;
};

struct Recipe {
    std::string id;
    std::map<std::string, int> inputs;
    std::string output;
    int output_count = 1;
    std::string station;  // "" = craftable anywhere
    std::string grid;     // e.g. "2x2", "3x3", "1x1"
};

struct GatherRule {
    std::string resource;
    std::vector<std::string> tools;  // acceptable tools, lowest tier first; empty = no gate
};

class TechTree {
  public:
    static TechTree load(const std::string& path);
    static TechTree from_json(const nlohmann::json& doc);

    const std::string& name() const { return name_; }

    bool has_item(const std::string& name) const { return items_.count(name) > 0; }
    const ItemDef& item(const std::string& name) const;  // throws on unknown item
    const std::map<std::string, ItemDef>& items() const { return items_; }

    const Recipe* find_recipe(const std::string& id) const;
    const Recipe* recipe_for_output(const std::string& item) const;
    const std::vector<Recipe>& recipes() const { return recipes_; }

    const GatherRule* gather_rule(const std::string& resource) const;
    bool gatherable(const std::string& resource) const { return gather_rule(resource) != nullptr; }

    // Longest dependency chain below an item (inputs, station, gather tool).
    // Raw un-gated resources have depth 0. Used for curriculum ordering.
    int depth(const std::string& item) const;

  private:
    void validate() const;  // reference closure + acyclicity

    std::string name_;
    std::map<std::string, ItemDef> items_;
    std::vector<Recipe> recipes_;
    std::map<std::string, std::size_t> recipe_index_;     // id -> recipes_ slot
    std::map<std::string, std::size_t> output_index_;     // output item -> recipes_ slot
    std::map<std::string, GatherRule> gather_rules_;
};

struct WorldState {
    std::map<std::string, std::int64_t> inventory;
    std::set<std::string> placed_stations;
    std::set<std::string> unlocked;  // items ever obtained; only grows
    std::int64_t episode_step = 0;   // cumulative executed actions
    std::uint64_t rng_seed = 0;

    std::int64_t count(const std::string& item) const {
        auto it = inventory.find(item);
        return it == inventory.end() ? 0 : it->second;
    }
};

namespace fail_reason {
inline constexpr const char* missing_tool = "missing_tool";
inline constexpr const char* missing_inputs = "missing_inputs";
inline constexpr const char* missing_station = "missing_station";
inline constexpr const char* missing_fuel = "missing_fuel";
inline constexpr const char* unknown_action_target = "unknown_action_target";
}  // namespace fail_reason

struct StepOutcome {
    bool ok = false;
    std::string reason;  // empty when ok

    static StepOutcome success() { return {true, {}}; }
    static StepOutcome failure(std::string r) { return {false, std::move(r)}; }
};

struct StepRecord {
    Action action;
    StepOutcome outcome;
    std::map<std::string, std::int64_t> inventory_delta;
    std::vector<std::string> newly_unlocked;
};

struct Trace {
    std::vector<StepRecord> records;
    bool success = false;
    int steps_used = 0;
};

// Apply one action in place. Failures are in-band outcomes, never exceptions.
StepOutcome step(WorldState& state, const Action& action, const TechTree& tree);

// Fold step over the plan, stopping at the first failure. Success requires a
// clean run and at least one unit of the goal item in the final inventory.
Trace execute(const std::vector<Action>& plan, WorldState& state, const TechTree& tree,
              const std::string& goal);

int unlocked_count(const WorldState& state);

// For smelts: the fuel item that would burn given this inventory with the
// recipe inputs already reserved, or nullopt. Lexicographically smallest
// fuel-tagged item, so the choice is deterministic.
std::optional<std::string> pick_fuel(const std::map<std::string, std::int64_t>& inventory,
                                     const Recipe& recipe, const TechTree& tree);

// JSON round-trip for actions and states (bank files, CLI reports).
nlohmann::json action_to_json(const Action& a);
Action action_from_json(const nlohmann::json& j);
nlohmann::json state_to_json(const WorldState& s);
WorldState state_from_json(const nlohmann::json& j);

}  // namespace echo
