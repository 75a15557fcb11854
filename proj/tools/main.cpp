// echo-agent: crafting-world agent with transfer-oriented memory.
//
// Subcommands: run, induce, query, verify, maintain, ablate, ksweep, report.
// All commands are deterministic for a fixed seed with the builtin policy.

#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "echo/agent.hpp"
#include "echo/experiments.hpp"
#include "echo/external_policy.hpp"
#include "echo/kernels.hpp"

using nlohmann::json;

namespace {

echo::AxisWeights parse_weights(const std::string& csv) {
    std::array<double, echo::kAxisCount> raw{};
    std::stringstream in(csv);
    std::string part;
    std::size_t i = 0;
    while (std::getline(in, part, ',')) {
        if (i >= echo::kAxisCount) throw CLI::ValidationError("--weights", "expected 5 values");
        raw[i++] = std::stod(part);
    }
    if (i != echo::kAxisCount) throw CLI::ValidationError("--weights", "expected 5 values");
    return echo::AxisWeights(raw);
}

std::unique_ptr<echo::PolicyModel> make_policy(const std::string& spec,
                                               const echo::AnalogyConfig& cfg) {
    if (spec == "builtin") return std::make_unique<echo::BuiltinPolicy>(cfg);
    if (spec.rfind("external:", 0) == 0)
        return std::make_unique<echo::ExternalPolicy>(spec.substr(9));
    throw CLI::ValidationError("--policy", "expected builtin or external:<command>");
}

void write_out(const json& doc, const std::string& out_path) {
    if (out_path.empty())
        std::cout << doc.dump(2) << "\n";
    else
        echo::emit(doc, out_path);
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        echo::emit_text(text, out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crafting-world agent with transfer-oriented memory"};
    app.require_subcommand(1);

    std::string tree_path = "data/tech_tree.json";
    std::string bank_path, failures_path, out_path;
    std::string format = "json";
    std::uint64_t seed = 1;
    app.add_option("--tree", tree_path, "tech tree JSON file")->capture_default_str();
    app.add_option("--bank", bank_path, "memory bank JSONL file");
    app.add_option("--failures", failures_path, "failure log JSONL file");
    app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "json|csv")->capture_default_str();

    auto failures_or_default = [&]() {
        return failures_path.empty() ? bank_path + ".failures" : failures_path;
    };

    // ---- run ----
    auto* run = app.add_subcommand("run", "run a from-scratch curriculum");
    int episodes = 30, k = 8, action_budget = 64, induce_budget = 4;
    int proactive_every = 3, maintenance_every = 10;
    std::string transfer = "on", weights_csv = "1,1,1,1,1";
    run->add_option("--episodes", episodes)->capture_default_str();
    run->add_option("--transfer", transfer, "on|off")->capture_default_str();
    run->add_option("--k", k)->capture_default_str();
    run->add_option("--weights", weights_csv, "s,a,p,f,i")->capture_default_str();
    run->add_option("--budget", action_budget, "per-episode action budget")->capture_default_str();
    run->add_option("--induce-budget", induce_budget)->capture_default_str();
    run->add_option("--proactive-every", proactive_every)->capture_default_str();
    run->add_option("--maintenance-every", maintenance_every)->capture_default_str();

    // ---- induce ----
    auto* induce = app.add_subcommand("induce", "one proactive induction round over a bank");
    std::string strategy = "most_successful", policy_spec = "builtin", state_path, state_out;
    int trial_budget = 4;
    induce->add_option("--k", k)->capture_default_str();
    induce->add_option("--weights", weights_csv)->capture_default_str();
    induce->add_option("--strategy", strategy, "most_successful|most_recent")
        ->capture_default_str();
    induce->add_option("--budget", trial_budget)->capture_default_str();
    induce->add_option("--policy", policy_spec, "builtin|external:<command>")
        ->capture_default_str();
    induce->add_option("--state", state_path, "world state JSON (default: fresh world)");
    induce->add_option("--state-out", state_out, "write post-round state here");
    bool save_bank = false;
    induce->add_flag("--save-bank", save_bank, "persist bank changes in place");

    // ---- query ----
    auto* query = app.add_subcommand("query", "retrieve top-k entries for a goal");
    std::string goal;
    query->add_option("--goal", goal, "goal item")->required();
    query->add_option("--k", k)->capture_default_str();
    query->add_option("--weights", weights_csv)->capture_default_str();

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "verify a plan file against the tree");
    std::string plan_path;
    verify_cmd->add_option("--plan", plan_path, "JSON {plan:[...], assertions:[...]}")->required();
    verify_cmd->add_option("--state", state_path, "world state JSON (default: fresh world)");

    // ---- maintain ----
    auto* maintain = app.add_subcommand("maintain", "offline dedup / cleaning / clustering");
    double dedup_threshold = 0.95, cluster_threshold = 0.85;
    bool do_clean = false;
    maintain->add_option("--dedup-threshold", dedup_threshold)->capture_default_str();
    maintain->add_option("--cluster-threshold", cluster_threshold)->capture_default_str();
    maintain->add_flag("--clean", do_clean, "drop entries referencing uncataloged items");

    // ---- ablate ----
    auto* ablate = app.add_subcommand("ablate", "keep-only/remove axis ablation, paired seeds");
    std::string axis_name_arg = "functional", mode = "remove";
    int n_seeds = 20;
    ablate->add_option("--axis", axis_name_arg,
                       "structural|attribute|procedural|functional|interaction")
        ->capture_default_str();
    ablate->add_option("--mode", mode, "keep_only|remove")->capture_default_str();
    ablate->add_option("--seeds", n_seeds)->capture_default_str();
    ablate->add_option("--episodes", episodes)->capture_default_str();

    // ---- ksweep ----
    auto* ksweep = app.add_subcommand("ksweep", "k-shot sweep over paired seeds");
    std::string ks_csv = "1,2,4,8";
    ksweep->add_option("--ks", ks_csv)->capture_default_str();
    ksweep->add_option("--seeds", n_seeds)->capture_default_str();
    ksweep->add_option("--episodes", episodes)->capture_default_str();

    // ---- report ----
    auto* report_cmd =
        app.add_subcommand("report", "paired transfer on/off comparison (speed-up, bursts)");
    report_cmd->add_option("--seeds", n_seeds)->capture_default_str();
    report_cmd->add_option("--episodes", episodes)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const echo::TechTree tree = echo::TechTree::load(tree_path);

        if (*run) {
            echo::CurriculumConfig cfg;
            cfg.episodes = episodes;
            cfg.proactive_every = proactive_every;
            cfg.base.k = k;
            cfg.base.weights = parse_weights(weights_csv);
            cfg.base.action_budget = action_budget;
            cfg.base.induce_budget = induce_budget;
            cfg.base.maintenance_every = maintenance_every;
            cfg.base.transfer = transfer == "on";
            const echo::BuiltinPolicy policy;
            const echo::RunReport report =
                echo::run_curriculum(echo::default_curriculum(tree, cfg, seed), seed, tree, policy);
            if (format == "csv")
                write_text(echo::unlock_series_to_csv(report), out_path);
            else
                write_out(echo::run_report_to_json(report), out_path);
        } else if (*induce) {
            if (bank_path.empty()) throw CLI::ValidationError("--bank", "required for induce");
            echo::MemoryBank bank = echo::MemoryBank::load(bank_path, failures_or_default());
            echo::WorldState state;
            if (!state_path.empty()) {
                std::ifstream in(state_path);
                if (!in) throw std::runtime_error("cannot open state file: " + state_path);
                json j;
                in >> j;
                state = echo::state_from_json(j);
            }
            echo::InduceConfig icfg;
            icfg.k = k;
            icfg.weights = parse_weights(weights_csv);
            icfg.strategy = strategy == "most_recent" ? echo::SeedStrategy::MostRecent
                                                      : echo::SeedStrategy::MostSuccessful;
            icfg.budget = trial_budget;
            echo::AnalogyConfig acfg;
            acfg.dim = bank.dim();
            const auto policy = make_policy(policy_spec, acfg);
            const echo::EpisodeTime now{0, state.episode_step};
            const auto trials = echo::induce_and_trial(bank, state, tree, icfg, *policy, now);

            json jtrials = json::array();
            for (const auto& t : trials) {
                json actions = json::array();
                for (const auto& a : t.proposal.plan) actions.push_back(echo::action_to_json(a));
                json subs = json::array();
                for (const auto& s : t.proposal.substitutions)
                    subs.push_back({{"from", s.from},
                                    {"to", s.to},
                                    {"axis", echo::axis_name(s.licensed_by)},
                                    {"similarity", s.similarity}});
                jtrials.push_back({{"goal", t.proposal.goal_item},
                                   {"plan", actions},
                                   {"substitutions", subs},
                                   {"source_entry_id", t.proposal.source_entry_id},
                                   {"verdict", echo::report_to_json(t.report)},
                                   {"disposition", t.disposition}});
            }
            write_out(json{{"trials", jtrials}, {"bank_size", bank.size()}}, out_path);
            if (save_bank) bank.save(bank_path, failures_or_default());
            if (!state_out.empty()) echo::emit(echo::state_to_json(state), state_out);
        } else if (*query) {
            if (bank_path.empty()) throw CLI::ValidationError("--bank", "required for query");
            const echo::MemoryBank bank = echo::MemoryBank::load(bank_path, failures_or_default());
            echo::WorldState state;
            const echo::Csd q = echo::goal_query_csd(goal, state, tree, bank.dim());
            echo::RetrievalOptions opts;
            opts.k = k;
            opts.weights = parse_weights(weights_csv);
            const echo::RetrievalResult result = echo::retrieve_top_k(q, bank, opts);
            json ranked = json::array();
            for (const auto& s : result.ranked) {
                json per_axis;
                for (echo::Axis a : echo::kAxes)
                    per_axis[echo::axis_key(a)] = s.per_axis[static_cast<std::size_t>(a)];
                const echo::MemoryEntry* e = bank.find(s.entry_id);
                ranked.push_back({{"entry_id", s.entry_id},
                                  {"task_name", e ? e->task_name : ""},
                                  {"aggregate", s.score},
                                  {"per_axis", per_axis}});
            }
            std::ostringstream fp;
            fp << std::hex << result.query_fingerprint;
            write_out(json{{"goal", goal}, {"query_fingerprint", fp.str()}, {"ranked", ranked}},
                      out_path);
        } else if (*verify_cmd) {
            std::ifstream in(plan_path);
            if (!in) throw std::runtime_error("cannot open plan file: " + plan_path);
            json doc;
            in >> doc;
            std::vector<echo::Action> plan;
            for (const json& a : doc.at("plan")) plan.push_back(echo::action_from_json(a));
            std::vector<echo::Assertion> asserts;
            for (const json& a : doc.value("assertions", json::array()))
                asserts.push_back(echo::assertion_from_json(a));
            echo::WorldState state;
            if (!state_path.empty()) {
                std::ifstream sin(state_path);
                if (!sin) throw std::runtime_error("cannot open state file: " + state_path);
                json j;
                sin >> j;
                state = echo::state_from_json(j);
            }
            write_out(echo::report_to_json(echo::verify(plan, asserts, state, tree)), out_path);
        } else if (*maintain) {
            if (bank_path.empty()) throw CLI::ValidationError("--bank", "required for maintain");
            echo::MemoryBank bank = echo::MemoryBank::load(bank_path, failures_or_default());
            const std::size_t removed = bank.deduplicate(dedup_threshold);
            const std::size_t cleaned = do_clean ? bank.clean(tree) : 0;
            const echo::ClusterSet clusters = bank.cluster(cluster_threshold);
            json jclusters = json::array();
            for (const auto& c : clusters.clusters) jclusters.push_back(c.entry_ids);
            bank.save(bank_path, failures_or_default());
            write_out(json{{"deduplicated", removed},
                           {"cleaned", cleaned},
                           {"clusters", jclusters},
                           {"bank_size", bank.size()}},
                      out_path);
        } else if (*ablate) {
            echo::AblationSpec spec;
            const auto axis = echo::axis_from_name(axis_name_arg);
            if (!axis) throw CLI::ValidationError("--axis", "unknown axis " + axis_name_arg);
            spec.axis = *axis;
            spec.mode = mode == "keep_only" ? echo::AblationSpec::Mode::KeepOnly
                                            : echo::AblationSpec::Mode::Remove;
            echo::ExperimentBase base;
            base.curriculum.episodes = episodes;
            const auto result =
                echo::run_ablation(spec, tree, base, echo::seed_list(seed, n_seeds));
            if (format == "csv")
                write_text(echo::ablation_to_csv(result), out_path);
            else
                write_out(echo::ablation_to_json(result), out_path);
        } else if (*ksweep) {
            std::vector<int> ks;
            std::stringstream in(ks_csv);
            std::string part;
            while (std::getline(in, part, ',')) ks.push_back(std::stoi(part));
            echo::ExperimentBase base;
            base.curriculum.episodes = episodes;
            const auto result =
                echo::run_kshot_sweep(ks, tree, base, echo::seed_list(seed, n_seeds));
            if (format == "csv")
                write_text(echo::ksweep_to_csv(result), out_path);
            else
                write_out(echo::ksweep_to_json(result), out_path);
        } else if (*report_cmd) {
            echo::ExperimentBase base;
            base.curriculum.episodes = episodes;
            const auto result =
                echo::run_transfer_comparison(tree, base, echo::seed_list(seed, n_seeds));
            if (format == "csv")
                write_text(echo::comparison_to_csv(result), out_path);
            else
                write_out(echo::comparison_to_json(result), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
