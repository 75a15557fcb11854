#pragma once
// Cold-start fallback planner: complete backward chaining over the recipe
// graph from the current state, resolving recipe inputs, stations, gather
// tools and smelting fuel. Stands in for pretrained low-level skills; its
// plans are never cached — only execution outcomes enter memory.

#include <optional>
#include <string>
#include <vector>

#include "echo/world.hpp"

namespace echo {

// A plan that makes at least one unit of `goal` from `state`, or nullopt if
// the goal is unreachable or the plan would exceed max_actions.
std::optional<std::vector<Action>> plan_goal(const std::string& goal, const WorldState& state,
                                             const TechTree& tree, int max_actions = 64);

}  // namespace echo
