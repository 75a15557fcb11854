#include "echo/memory_bank.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "echo/retrieval.hpp"

namespace echo {

using nlohmann::json;

std::uint64_t MemoryBank::commit_success(const TaskRecord& record, Csd csd,
                                         const std::vector<Action>& actions,
                                         EpisodeTime timestamp) {
    if (actions.empty())
        throw std::invalid_argument("commit_success: action sequence must be non-empty");
    for (MemoryEntry& entry : entries_) {
        if (entry.task_name == record.task_name && entry.csd.content_equal(csd)) {
            entry.success_count += 1;
            entry.attempt_count += 1;
            entry.last_success_at = std::max(entry.last_success_at, timestamp);
            return entry.entry_id;
        }
    }
    MemoryEntry entry;
    entry.entry_id = next_entry_id_++;
    entry.task_name = record.task_name;
    entry.csd = std::move(csd);
    entry.csd.meta.created_at = timestamp;
    entry.action_sequence = actions;
    entry.success_count = 1;
    entry.attempt_count = 1;
    entry.last_success_at = timestamp;
    entries_.push_back(std::move(entry));
    return entries_.back().entry_id;
}

void MemoryBank::log_failure(const std::string& task_name, const std::vector<Action>& actions,
                             const std::string& reason, EpisodeTime timestamp) {
    failures_.push_back({task_name, actions, reason, timestamp});
}

std::size_t MemoryBank::deduplicate(double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::invalid_argument("deduplicate: threshold must be in (0,1]");
    std::vector<bool> dead(entries_.size(), false);
    std::size_t removed = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (dead[i]) continue;
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            if (dead[j]) continue;
            if (entries_[i].task_name != entries_[j].task_name) continue;
            if (aggregate_similarity(entries_[i].csd, entries_[j].csd) >= threshold) {
                entries_[i].success_count += entries_[j].success_count;
                entries_[i].attempt_count += entries_[j].attempt_count;
                entries_[i].last_success_at =
                    std::max(entries_[i].last_success_at, entries_[j].last_success_at);
                dead[j] = true;
                ++removed;
            }
        }
    }
    if (removed > 0) {
        std::vector<MemoryEntry> kept;
        kept.reserve(entries_.size() - removed);
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (!dead[i]) kept.push_back(std::move(entries_[i]));
        entries_ = std::move(kept);
    }
    return removed;
}

std::size_t MemoryBank::clean(const TechTree& tree) {
    auto stale = [&](const MemoryEntry& e) {
        for (const Action& a : e.action_sequence) {
            switch (a.kind) {
                case ActionKind::Gather:
                case ActionKind::Place:
                    if (!tree.has_item(a.target)) return true;
                    break;
                case ActionKind::Craft:
                case ActionKind::Smelt:
                    if (tree.find_recipe(a.target) == nullptr) return true;
                    break;
            }
        }
        return false;
    };
    const std::size_t before = entries_.size();
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(), stale), entries_.end());
    return before - entries_.size();
}

ClusterSet MemoryBank::cluster(double threshold) const {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::invalid_argument("cluster: threshold must be in (0,1]");

    struct Working {
        std::vector<std::uint64_t> ids;
        std::array<std::vector<double>, kAxisCount> sums;  // unnormalized per-axis mean * n
    };
    std::vector<Working> working;

    auto centroid = [&](const Working& w, Axis a) {
        const auto& sum = w.sums[static_cast<std::size_t>(a)];
        Embedding c{std::vector<double>(sum.size(), 0.0)};
        double norm_sq = 0.0;
        for (double v : sum) norm_sq += v * v;
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (std::size_t i = 0; i < sum.size(); ++i) c.values[i] = sum[i] * inv;
        }
        return c;
    };

    for (const MemoryEntry& entry : entries_) {
        std::size_t joined = working.size();
        for (std::size_t ci = 0; ci < working.size(); ++ci) {
            std::array<double, kAxisCount> per_axis{};
            for (Axis a : kAxes) {
                const Embedding c = centroid(working[ci], a);
                const Embedding& e = entry.csd.axis(a).embedding;
                per_axis[static_cast<std::size_t>(a)] =
                    (c.values.empty() || e.values.empty()) ? 0.0 : std::max(0.0, cosine(c, e));
            }
            if (aggregate(per_axis, AxisWeights::uniform()) >= threshold) {
                joined = ci;
                break;
            }
        }
        if (joined == working.size()) {
            Working w;
            w.ids.push_back(entry.entry_id);
            for (Axis a : kAxes)
                w.sums[static_cast<std::size_t>(a)] = entry.csd.axis(a).embedding.values;
            working.push_back(std::move(w));
        } else {
            Working& w = working[joined];
            w.ids.push_back(entry.entry_id);
            for (Axis a : kAxes) {
                auto& sum = w.sums[static_cast<std::size_t>(a)];
                const auto& v = entry.csd.axis(a).embedding.values;
                if (sum.size() < v.size()) sum.resize(v.size(), 0.0);
                for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
            }
        }
    }

    ClusterSet out;
    for (const Working& w : working) {
        ClusterSet::Cluster c;
        c.entry_ids = w.ids;
        for (Axis a : kAxes) c.centroids[static_cast<std::size_t>(a)] = centroid(w, a);
        out.clusters.push_back(std::move(c));
    }
    return out;
}

const MemoryEntry* MemoryBank::find(std::uint64_t entry_id) const {
    for (const MemoryEntry& e : entries_)
        if (e.entry_id == entry_id) return &e;
    return nullptr;
}

const MemoryEntry* MemoryBank::find_by_task(const std::string& task_name) const {
    const MemoryEntry* best = nullptr;
    for (const MemoryEntry& e : entries_) {
        if (e.task_name != task_name) continue;
        if (best == nullptr || e.success_count > best->success_count ||
            (e.success_count == best->success_count && e.last_success_at > best->last_success_at))
            best = &e;
    }
    return best;
}

// --- persistence -------------------------------------------------------------

namespace {

json time_to_json(const EpisodeTime& t) {
    return json{{"episode", t.episode}, {"step", t.step}};
}

EpisodeTime time_from_json(const json& j) {
    return {j.at("episode").get<std::int64_t>(), j.at("step").get<std::int64_t>()};
}

json entry_to_json(const MemoryEntry& e) {
    json actions = json::array();
    for (const Action& a : e.action_sequence) actions.push_back(action_to_json(a));
    return json{{"entry_id", e.entry_id},
                {"task_name", e.task_name},
                {"csd", csd_to_json(e.csd)},
                {"actions", actions},
                {"success_count", e.success_count},
                {"attempt_count", e.attempt_count},
                {"last_success_at", time_to_json(e.last_success_at)}};
}

MemoryEntry entry_from_json(const json& j) {
    MemoryEntry e;
    e.entry_id = j.at("entry_id").get<std::uint64_t>();
    e.task_name = j.at("task_name").get<std::string>();
    e.csd = csd_from_json(j.at("csd"), /*check_coherence=*/true);
    for (const json& a : j.at("actions")) e.action_sequence.push_back(action_from_json(a));
    e.success_count = j.at("success_count").get<std::int64_t>();
    e.attempt_count = j.at("attempt_count").get<std::int64_t>();
    e.last_success_at = time_from_json(j.at("last_success_at"));
    return e;
}

}  // namespace

void MemoryBank::save(const std::string& bank_path, const std::string& failures_path) const {
    std::ofstream out(bank_path);
    if (!out) throw std::runtime_error("cannot write bank file: " + bank_path);
    json header{{"format_version", 1},
                {"embedding_version", kEmbeddingVersion},
                {"dim", dim_},
                {"next_entry_id", next_entry_id_}};
    out << header.dump() << "\n";
    for (const MemoryEntry& e : entries_) out << entry_to_json(e).dump() << "\n";

    std::ofstream fout(failures_path);
    if (!fout) throw std::runtime_error("cannot write failure log: " + failures_path);
    for (const FailureRecord& f : failures_) {
        json actions = json::array();
        for (const Action& a : f.actions) actions.push_back(action_to_json(a));
        fout << json{{"task_name", f.task_name},
                     {"actions", actions},
                     {"reason", f.reason},
                     {"at", time_to_json(f.at)}}
                    .dump()
             << "\n";
    }
}

MemoryBank MemoryBank::load(const std::string& bank_path, const std::string& failures_path) {
    std::ifstream in(bank_path);
    if (!in) throw std::runtime_error("cannot open bank file: " + bank_path);

    std::string line;
    std::size_t line_no = 0;
    auto parse_line = [&](const std::string& text) {
        try {
            return json::parse(text);
        } catch (const json::exception& e) {
            throw std::runtime_error("bank file " + bank_path + " line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
    };

    if (!std::getline(in, line)) throw std::runtime_error("bank file is empty: " + bank_path);
    line_no = 1;
    const json header = parse_line(line);
    if (header.value("format_version", 0) != 1)
        throw std::runtime_error("bank file " + bank_path + ": unsupported format version");
    if (header.value("embedding_version", "") != kEmbeddingVersion)
        throw std::runtime_error("bank file " + bank_path + ": embedding version mismatch");

    MemoryBank bank(header.at("dim").get<std::size_t>());
    bank.next_entry_id_ = header.at("next_entry_id").get<std::uint64_t>();

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            bank.entries_.push_back(entry_from_json(parse_line(line)));
        } catch (const json::exception& e) {
            throw std::runtime_error("bank file " + bank_path + " line " +
                                     std::to_string(line_no) + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("bank file " + bank_path + " line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
        const MemoryEntry& e = bank.entries_.back();
        if (e.success_count < 1 || e.success_count > e.attempt_count ||
            e.action_sequence.empty())
            throw std::runtime_error("bank file " + bank_path + " line " +
                                     std::to_string(line_no) + ": invariant violation");
    }

    std::ifstream fin(failures_path);
    if (fin) {
        line_no = 0;
        while (std::getline(fin, line)) {
            ++line_no;
            if (line.empty()) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception& e) {
                throw std::runtime_error("failure log " + failures_path + " line " +
                                         std::to_string(line_no) + ": " + e.what());
            }
            FailureRecord f;
            f.task_name = j.at("task_name").get<std::string>();
            for (const json& a : j.at("actions")) f.actions.push_back(action_from_json(a));
            f.reason = j.at("reason").get<std::string>();
            f.at = time_from_json(j.at("at"));
            bank.failures_.push_back(std::move(f));
        }
    }
    return bank;
}

}  // namespace echo
