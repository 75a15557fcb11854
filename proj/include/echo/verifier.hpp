#pragma once
// Plan verifier: symbolic abstract execution of a plan against a copy of the
// current state, checking internal consistency (inputs derivable, stations
// placed before use, fuel available), external feasibility (known items and
// recipes, satisfiable tool gates) and planner-supplied assertions. All
// violations are collected; nothing is mutated.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "echo/world.hpp"

namespace echo {

struct Assertion {
    enum class Kind { RequiresStation, RequiresItem, Produces };
    Kind kind = Kind::Produces;
    std::string target;
    int count = 1;  // >= 1; unused for RequiresStation

    bool operator==(const Assertion&) const = default;

    static Assertion requires_station(std::string s) {
        return {Kind::RequiresStation, std::move(s), 1};
    }
    static Assertion requires_item(std::string item, int count) {
        return {Kind::RequiresItem, std::move(item), count};
    }
    static Assertion produces(std::string item, int count) {
        return {Kind::Produces, std::move(item), count};
    }
};

namespace verify_reason {
inline constexpr const char* unknown_item = "unknown_item";
inline constexpr const char* unknown_recipe = "unknown_recipe";
inline constexpr const char* assertion_mismatch = "assertion_mismatch";
// Plan-level reasons reuse fail_reason::* from the simulator.
}  // namespace verify_reason

struct Violation {
    enum class Where { Plan, Assertion };
    Where where = Where::Plan;
    int index = 0;
    std::string reason;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct VerificationReport {
    bool pass = false;  // pass <=> violations empty
    std::vector<Violation> violations;
};

VerificationReport verify(const std::vector<Action>& plan, const std::vector<Assertion>& asserts,
                          const WorldState& state, const TechTree& tree);

nlohmann::json report_to_json(const VerificationReport& report);
nlohmann::json assertion_to_json(const Assertion& a);
Assertion assertion_from_json(const nlohmann::json& j);

}  // namespace echo
