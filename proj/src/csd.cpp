#include "echo/csd.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace echo {

using nlohmann::json;

namespace {
constexpr std::array<const char*, kAxisCount> kKeys = {"struct", "attr", "proc", "func", "inter"};
constexpr std::array<const char*, kAxisCount> kNames = {"structural", "attribute", "procedural",
                                                        "functional", "interaction"};
}  // namespace

const char* axis_key(Axis a) { return kKeys[static_cast<std::size_t>(a)]; }
const char* axis_name(Axis a) { return kNames[static_cast<std::size_t>(a)]; }

std::optional<Axis> axis_from_key(std::string_view key) {
    for (Axis a : kAxes)
        if (key == axis_key(a)) return a;
    return std::nullopt;
}

std::optional<Axis> axis_from_name(std::string_view name) {
    for (Axis a : kAxes)
        if (name == axis_name(a)) return a;
    return std::nullopt;
}

bool Csd::content_equal(const Csd& other) const {
    for (Axis a : kAxes)
        if (axis(a).content != other.axis(a).content) return false;
    return true;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            cur += static_cast<char>(std::tolower(uc));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> csd_axis_tokens(const Csd& csd, Axis axis) {
    std::vector<std::string> tokens;
    for (const std::string& statement : csd.axis(axis).content) {
        for (std::string& t : tokenize(statement)) tokens.push_back(std::move(t));
    }
    return tokens;
}

Embedding encode_axis(const std::vector<std::string>& content, std::size_t dim) {
    std::vector<std::string> tokens;
    for (const std::string& statement : content)
        for (std::string& t : tokenize(statement)) tokens.push_back(std::move(t));
    return encode_text(tokens, dim);
}

std::map<std::string, std::string> default_model_versions(std::size_t dim) {
    return {{"embedding", std::string(kEmbeddingVersion) + "/d" + std::to_string(dim)},
            {"csd_builder", "rules-v1"}};
}

Csd build_csd(const TaskRecord& record, const WorldState& snapshot, const TechTree& tree,
              std::size_t dim) {
    std::set<std::string> involved(record.items.begin(), record.items.end());
    std::set<std::string> structural, interaction;
    std::vector<std::string> chain;

    for (const Action& a : record.actions) {
        chain.push_back(action_kind_name(a.kind));
        switch (a.kind) {
            case ActionKind::Gather: {
                involved.insert(a.target);
                if (const GatherRule* rule = tree.gather_rule(a.target)) {
                    if (!rule->tools.empty()) interaction.insert("uses:" + rule->tools.front());
                }
                break;
            }
            case ActionKind::Craft:
            case ActionKind::Smelt: {
                const Recipe* r = tree.find_recipe(a.target);
                if (r == nullptr)
                    throw std::invalid_argument("build_csd: unknown recipe " + a.target);
                involved.insert(r->output);
                for (const auto& [in, n] : r->inputs) involved.insert(in);
                structural.insert("recipe_grid:" + r->output + ":" + r->grid);
                if (!r->station.empty()) interaction.insert("uses:" + r->station);
                break;
            }
            case ActionKind::Place: {
                involved.insert(a.target);
                structural.insert("placed:" + a.target);
                break;
            }
        }
    }

    std::set<std::string> attribute, functional;
    for (const std::string& name : involved) {
        const ItemDef& def = tree.item(name);  // throws on unknown item
        for (const std::string& attr : def.attributes) attribute.insert(name + ": " + attr);
        if (!def.material_family.empty())
            attribute.insert(name + ": material family " + def.material_family);
        for (const std::string& fn : def.functions) functional.insert(name + ": " + fn);
    }

    Csd csd;
    csd.meta.created_at = {0, snapshot.episode_step};
    csd.meta.source_env = tree.name();
    csd.meta.model_versions = default_model_versions(dim);

    auto fill = [&](Axis axis, const std::set<std::string>& statements) {
        AxisPayload& p = csd.axis(axis);
        p.content.assign(statements.begin(), statements.end());
        p.embedding = encode_axis(p.content, dim);
    };
    fill(Axis::Structural, structural);
    fill(Axis::Attribute, attribute);
    fill(Axis::Functional, functional);
    fill(Axis::Interaction, interaction);

    AxisPayload& proc = csd.axis(Axis::Procedural);
    if (!chain.empty()) {
        std::string joined = chain.front();
        for (std::size_t i = 1; i < chain.size(); ++i) joined += "→" + chain[i];
        proc.content.push_back(std::move(joined));
    }
    proc.embedding = encode_axis(proc.content, dim);

    return csd;
}

json csd_to_json(const Csd& csd) {
    json j;
    j["meta"] = {{"created_at", {{"episode", csd.meta.created_at.episode},
                                 {"step", csd.meta.created_at.step}}},
                 {"source_env", csd.meta.source_env},
                 {"model_versions", csd.meta.model_versions}};
    for (Axis a : kAxes) {
        const AxisPayload& p = csd.axis(a);
        j[axis_key(a)] = {{"content", p.content}, {"embedding", p.embedding.values}};
    }
    return j;
}

Csd csd_from_json(const json& j, bool check_coherence) {
    Csd csd;
    const json& meta = j.at("meta");
    csd.meta.created_at.episode = meta.at("created_at").at("episode").get<std::int64_t>();
    csd.meta.created_at.step = meta.at("created_at").at("step").get<std::int64_t>();
    csd.meta.source_env = meta.at("source_env").get<std::string>();
    csd.meta.model_versions =
        meta.at("model_versions").get<std::map<std::string, std::string>>();

    std::size_t dim = kDefaultEmbeddingDim;
    for (Axis a : kAxes) {
        const json& p = j.at(axis_key(a));
        AxisPayload& payload = csd.axis(a);
        payload.content = p.at("content").get<std::vector<std::string>>();
        payload.embedding = Embedding(p.at("embedding").get<std::vector<double>>());
        if (!payload.embedding.values.empty()) dim = payload.embedding.dim();
        if (!std::is_sorted(payload.content.begin(), payload.content.end()))
            throw std::runtime_error(std::string("csd: axis ") + axis_key(a) +
                                     " content not in canonical order");
    }
    if (check_coherence) {
        for (Axis a : kAxes) {
            const AxisPayload& payload = csd.axis(a);
            if (encode_axis(payload.content, dim) != payload.embedding)
                throw std::runtime_error(std::string("csd: axis ") + axis_key(a) +
                                         " embedding does not match its content");
        }
    }
    return csd;
}

}  // namespace echo
