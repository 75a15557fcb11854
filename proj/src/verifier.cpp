#include "echo/verifier.hpp"

#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace echo {

using nlohmann::json;

VerificationReport verify(const std::vector<Action>& plan, const std::vector<Assertion>& asserts,
                          const WorldState& state, const TechTree& tree) {
    VerificationReport report;
    auto violate = [&](Violation::Where where, int index, std::string reason, std::string msg) {
        report.violations.push_back({where, index, std::move(reason), std::move(msg)});
    };

    // Abstract state. On a violation the step is assumed repaired (outputs
    // granted, available inputs consumed) so later steps are checked against
    // their own preconditions and every error source surfaces independently.
    std::map<std::string, std::int64_t> inv = state.inventory;
    std::set<std::string> stations = state.placed_stations;
    std::map<std::string, std::int64_t> consumed_total;

    auto take = [&](const std::string& item, std::int64_t n) {
        auto it = inv.find(item);
        const std::int64_t have = it == inv.end() ? 0 : it->second;
        const std::int64_t used = std::min(have, n);
        inv[item] = have - used;
        consumed_total[item] += n;
    };

    for (std::size_t i = 0; i < plan.size(); ++i) {
        const Action& a = plan[i];
        const int idx = static_cast<int>(i);
        switch (a.kind) {
            case ActionKind::Gather: {
                const GatherRule* rule = tree.gather_rule(a.target);
                if (rule == nullptr || a.count < 1) {
                    violate(Violation::Where::Plan, idx, fail_reason::unknown_action_target,
                            "cannot gather " + a.target);
                    break;
                }
                if (!rule->tools.empty()) {
                    bool have = false;
                    for (const std::string& t : rule->tools)
                        if (inv.count(t) != 0 && inv[t] >= 1) { have = true; break; }
                    if (!have)
                        violate(Violation::Where::Plan, idx, fail_reason::missing_tool,
                                "no tool for " + a.target + " at step " + std::to_string(idx));
                }
                inv[a.target] += a.count;
                break;
            }
            case ActionKind::Craft:
            case ActionKind::Smelt: {
                const Recipe* r = tree.find_recipe(a.target);
                if (r == nullptr) {
                    violate(Violation::Where::Plan, idx, verify_reason::unknown_recipe,
                            "no recipe " + a.target);
                    break;
                }
                if (!r->station.empty() && stations.count(r->station) == 0)
                    violate(Violation::Where::Plan, idx, fail_reason::missing_station,
                            r->station + " not placed before " + a.target);
                for (const auto& [in, n] : r->inputs) {
                    const auto it = inv.find(in);
                    if (it == inv.end() || it->second < n)
                        violate(Violation::Where::Plan, idx, fail_reason::missing_inputs,
                                a.target + " lacks " + std::to_string(n) + " " + in);
                }
                std::optional<std::string> fuel;
                if (a.kind == ActionKind::Smelt) {
                    fuel = pick_fuel(inv, *r, tree);
                    if (!fuel)
                        violate(Violation::Where::Plan, idx, fail_reason::missing_fuel,
                                "no fuel for " + a.target);
                }
                for (const auto& [in, n] : r->inputs) take(in, n);
                if (fuel) take(*fuel, 1);
                inv[r->output] += r->output_count;
                break;
            }
            case ActionKind::Place: {
                if (!tree.has_item(a.target)) {
                    violate(Violation::Where::Plan, idx, verify_reason::unknown_item,
                            "no item " + a.target);
                    break;
                }
                if (inv.count(a.target) == 0 || inv[a.target] < 1)
                    violate(Violation::Where::Plan, idx, fail_reason::missing_inputs,
                            a.target + " not in inventory to place");
                take(a.target, 1);
                stations.insert(a.target);
                break;
            }
        }
    }

    for (std::size_t i = 0; i < asserts.size(); ++i) {
        const Assertion& as = asserts[i];
        const int idx = static_cast<int>(i);
        switch (as.kind) {
            case Assertion::Kind::RequiresStation:
                if (stations.count(as.target) == 0)
                    violate(Violation::Where::Assertion, idx, verify_reason::assertion_mismatch,
                            "plan never has station " + as.target);
                break;
            case Assertion::Kind::RequiresItem:
                if (consumed_total[as.target] < as.count)
                    violate(Violation::Where::Assertion, idx, verify_reason::assertion_mismatch,
                            "plan does not consume " + std::to_string(as.count) + " " + as.target);
                break;
            case Assertion::Kind::Produces: {
                const auto it = inv.find(as.target);
                if (it == inv.end() || it->second < as.count)
                    violate(Violation::Where::Assertion, idx, verify_reason::assertion_mismatch,
                            "final state lacks " + std::to_string(as.count) + " " + as.target);
                break;
            }
        }
    }

    report.pass = report.violations.empty();
    return report;
}

json assertion_to_json(const Assertion& a) {
    switch (a.kind) {
        case Assertion::Kind::RequiresStation:
            return json{{"kind", "requires_station"}, {"station", a.target}};
        case Assertion::Kind::RequiresItem:
            return json{{"kind", "requires_item"}, {"item", a.target}, {"count", a.count}};
        case Assertion::Kind::Produces:
            return json{{"kind", "produces"}, {"item", a.target}, {"count", a.count}};
    }
    return {};
}

Assertion assertion_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "requires_station")
        return Assertion::requires_station(j.at("station").get<std::string>());
    if (kind == "requires_item")
        return Assertion::requires_item(j.at("item").get<std::string>(), j.value("count", 1));
    if (kind == "produces")
        return Assertion::produces(j.at("item").get<std::string>(), j.value("count", 1));
    throw std::runtime_error("bad assertion kind: " + kind);
}

json report_to_json(const VerificationReport& report) {
    json violations = json::array();
    for (const Violation& v : report.violations) {
        violations.push_back(
            {{"where", v.where == Violation::Where::Plan ? "plan" : "assertion"},
             {"index", v.index},
             {"reason", v.reason},
             {"message", v.message}});
    }
    return json{{"verdict", report.pass ? "pass" : "fail"}, {"violations", violations}};
}

}  // namespace echo
