#pragma once
// In-context analogical learning: seed selection, context construction, the
// pluggable policy interface, the built-in rule-based policy (single-item
// material substitution licensed by functional similarity or shared material
// family), pattern abstraction over clusters, and the induce-and-trial round.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "echo/memory_bank.hpp"
#include "echo/retrieval.hpp"
#include "echo/verifier.hpp"
#include "echo/world.hpp"

namespace echo {

inline constexpr const char* kContextProtocol = "icl-context/v1";

struct IclContext {
    MemoryEntry seed;
    std::vector<MemoryEntry> exemplars;                    // retrieval order
    std::vector<std::array<double, kAxisCount>> evidence;  // per exemplar
    std::string protocol = kContextProtocol;
};

struct Substitution {
    std::string from;
    std::string to;
    Axis licensed_by = Axis::Functional;
    double similarity = 0.0;

    bool operator==(const Substitution&) const = default;
};

struct TaskProposal {
    std::string goal_item;
    std::vector<Action> plan;
    std::vector<Assertion> asserts;
    std::uint64_t source_entry_id = 0;  // the context entry this analogy came from
    std::vector<Substitution> substitutions;
};

// Frozen policy: proposals are a pure function of (context, state, tree).
class PolicyModel {
  public:
    virtual ~PolicyModel() = default;
    virtual std::vector<TaskProposal> propose(const IclContext& ctx, const WorldState& state,
                                              const TechTree& tree) const = 0;
    virtual std::string name() const = 0;
};

enum class SeedStrategy { MostSuccessful, MostRecent };

// Throws std::runtime_error on an empty bank.
const MemoryEntry& select_seed_task(const MemoryBank& bank, SeedStrategy strategy);

// Resolves retrieval ids against the bank and fixes exemplar order. The
// result must already exclude the seed's task. Throws on a dangling id.
IclContext construct_context(const MemoryEntry& seed, const RetrievalResult& result,
                             const MemoryBank& bank,
                             const std::string& protocol_id = kContextProtocol);

struct AnalogyConfig {
    double functional_threshold = 0.5;  // min cosine of catalog function texts
    int proposal_budget = 4;
    int acquire_depth = 2;  // recipe-expansion depth when assembling a plan
    // Licensing channels; ablations clear entries. Only Functional and
    // Attribute ever license substitutions, the rest are inert here.
    std::array<bool, kAxisCount> licensing = {true, true, true, true, true};
    std::size_t dim = kDefaultEmbeddingDim;
};

// The built-in analogy enumeration (also usable directly in tests).
// Scans the seed's goal recipe first, then each exemplar's, replacing one
// input item per proposal; plans are assembled from the current state with
// shallow acquisition plus stored plans from the context entries.
std::vector<TaskProposal> propose_analogical(const IclContext& ctx, const WorldState& state,
                                             const TechTree& tree, const AnalogyConfig& cfg);

class BuiltinPolicy : public PolicyModel {
  public:
    explicit BuiltinPolicy(AnalogyConfig cfg = {}) : cfg_(std::move(cfg)) {}
    std::vector<TaskProposal> propose(const IclContext& ctx, const WorldState& state,
                                      const TechTree& tree) const override {
        return propose_analogical(ctx, state, tree, cfg_);
    }
    std::string name() const override { return "builtin"; }
    const AnalogyConfig& config() const { return cfg_; }

  private:
    AnalogyConfig cfg_;
};

// A plan skeleton with typed item variables, abstracted from aligned member
// plans of a cluster. "<X>" marks the variable inside a target pattern.
struct PatternTemplate {
    struct Slot {
        ActionKind kind = ActionKind::Gather;
        std::string target_pattern;  // literal, or contains "<X>" style variables
        int count = 1;
    };
    std::vector<Slot> actions;
    std::vector<std::string> variables;  // e.g. {"X"}
    std::map<std::string, std::vector<std::string>> instantiations;  // variable -> sorted values
};

// Precondition: cluster.size() >= 2 (throws std::invalid_argument otherwise).
// Returns an empty list when member plans do not align.
std::vector<PatternTemplate> abstract_pattern(const std::vector<std::uint64_t>& cluster,
                                              const MemoryBank& bank, const TechTree& tree,
                                              const AnalogyConfig& cfg = {});

// Instantiate a template for one variable assignment.
std::vector<Action> instantiate_pattern(const PatternTemplate& tmpl,
                                        const std::map<std::string, std::string>& values);

struct TrialRecord {
    TaskProposal proposal;
    VerificationReport report;
    std::optional<Trace> trace;  // absent when not executed
    std::string disposition;     // "committed" | "failed" | "rejected" | "skipped"
};

struct InduceConfig {
    int k = 8;
    AxisWeights weights = AxisWeights::uniform();
    SeedStrategy strategy = SeedStrategy::MostSuccessful;
    int budget = 4;  // proposals processed per round
    std::string protocol = kContextProtocol;
};

// One proactive round: seed -> retrieve (excluding the seed's task) ->
// context -> propose -> verify -> execute fresh goals -> commit successes /
// log failures. Mutates state and bank. Throws on an empty bank.
std::vector<TrialRecord> induce_and_trial(MemoryBank& bank, WorldState& state,
                                          const TechTree& tree, const InduceConfig& cfg,
                                          const PolicyModel& policy, EpisodeTime now);

}  // namespace echo
