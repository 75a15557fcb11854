#pragma once
// Contextual State Descriptor: one metadata block plus five axis payloads
// (structural, attribute, procedural, functional, interaction), each holding
// canonical symbolic statements and an embedding of their tokens. CSDs are
// immutable after construction and every axis is always present — an axis
// with no knowledge is empty content + zero embedding, never absent.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "echo/embedding.hpp"
#include "echo/world.hpp"

namespace echo {

enum class Axis : std::uint8_t { Structural = 0, Attribute, Procedural, Functional, Interaction };

inline constexpr std::size_t kAxisCount = 5;
inline constexpr std::array<Axis, kAxisCount> kAxes = {
    Axis::Structural, Axis::Attribute, Axis::Procedural, Axis::Functional, Axis::Interaction};

const char* axis_key(Axis a);   // "struct" | "attr" | "proc" | "func" | "inter"
const char* axis_name(Axis a);  // "structural" | ...
std::optional<Axis> axis_from_key(std::string_view key);
std::optional<Axis> axis_from_name(std::string_view name);

// Logical time: (episode index, cumulative step index).
struct EpisodeTime {
    std::int64_t episode = 0;
    std::int64_t step = 0;
    auto operator<=>(const EpisodeTime&) const = default;
};

struct AxisPayload {
    std::vector<std::string> content;  // sorted, deduplicated statements
    Embedding embedding;               // encode_text over the content tokens

    bool operator==(const AxisPayload&) const = default;
};

struct CsdMeta {
    EpisodeTime created_at;
    std::string source_env;
    std::map<std::string, std::string> model_versions;

    bool operator==(const CsdMeta&) const = default;
};

struct Csd {
    CsdMeta meta;
    std::array<AxisPayload, kAxisCount> axes;

    AxisPayload& axis(Axis a) { return axes[static_cast<std::size_t>(a)]; }
    const AxisPayload& axis(Axis a) const { return axes[static_cast<std::size_t>(a)]; }

    // Equality of symbolic content across all five axes; meta is ignored.
    bool content_equal(const Csd& other) const;

    bool operator==(const Csd&) const = default;
};

// Canonical tokenizer: lowercases and splits on non-alphanumeric characters.
std::vector<std::string> tokenize(std::string_view text);

// Tokens of one axis, in content order. Empty axis gives an empty list.
std::vector<std::string> csd_axis_tokens(const Csd& csd, Axis axis);

// Rebuild an axis embedding from its content.
Embedding encode_axis(const std::vector<std::string>& content, std::size_t dim);

// A finished (or hypothetical) task: name, the actions taken, items involved.
// Items referenced by the action sequence are folded in automatically by
// build_csd, so `items` only needs entries with no supporting action.
struct TaskRecord {
    std::string task_name;
    std::vector<Action> actions;
    std::vector<std::string> items;
};

// Deterministic extraction from simulator ground truth:
//   structural  — recipe grid shapes and placed stations
//   attribute   — catalog attributes + material family of involved items
//   procedural  — the ordered action-type chain as one statement
//   functional  — catalog function descriptions of involved items
//   interaction — stations and gate tools the task operates through
// Throws std::invalid_argument if the record references an uncataloged item.
Csd build_csd(const TaskRecord& record, const WorldState& snapshot, const TechTree& tree,
              std::size_t dim = kDefaultEmbeddingDim);

std::map<std::string, std::string> default_model_versions(std::size_t dim);

nlohmann::json csd_to_json(const Csd& csd);
// check_coherence re-encodes each axis and requires bit-equality with the
// stored embedding; violations throw std::runtime_error.
Csd csd_from_json(const nlohmann::json& j, bool check_coherence = true);

}  // namespace echo
