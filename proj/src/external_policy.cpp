#include "echo/external_policy.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace echo {

std::string ExternalPolicy::render_request(const IclContext& ctx, const WorldState& state) {
    std::ostringstream out;
    out << "CONTEXT " << ctx.protocol << "\n";
    out << "SEED " << ctx.seed.task_name << "\n";
    for (const Action& a : ctx.seed.action_sequence) out << "  " << action_to_text(a) << "\n";
    for (std::size_t i = 0; i < ctx.exemplars.size(); ++i) {
        const MemoryEntry& e = ctx.exemplars[i];
        out << "EXEMPLAR " << e.task_name;
        for (Axis ax : kAxes)
            out << " " << axis_key(ax) << "=" << ctx.evidence[i][static_cast<std::size_t>(ax)];
        out << "\n";
        for (const Action& a : e.action_sequence) out << "  " << action_to_text(a) << "\n";
    }
    out << "STATE " << std::hex << fnv1a64(state_to_json(state).dump()) << "\n";
    out << "END\n";
    return out.str();
}

std::vector<TaskProposal> ExternalPolicy::parse_reply(const std::string& reply,
                                                      const TechTree& tree,
                                                      std::uint64_t source_entry_id) {
    std::vector<Action> plan;
    std::istringstream in(reply);
    std::string line;
    bool terminated = false;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        std::size_t start = line.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        line = line.substr(start);
        if (line == "END") {
            terminated = true;
            break;
        }
        auto action = action_from_text(line);
        if (!action) {
            std::cerr << "external policy: malformed action line dropped: " << line << "\n";
            return {};
        }
        plan.push_back(std::move(*action));
    }
    if (!terminated || plan.empty()) {
        if (!terminated) std::cerr << "external policy: reply not terminated by END\n";
        return {};
    }

    // Goal = output of the last craft/smelt step.
    std::string goal;
    for (auto it = plan.rbegin(); it != plan.rend(); ++it) {
        if (it->kind == ActionKind::Craft || it->kind == ActionKind::Smelt) {
            if (const Recipe* r = tree.find_recipe(it->target)) goal = r->output;
            break;
        }
    }
    if (goal.empty()) {
        std::cerr << "external policy: reply has no craft/smelt step, discarded\n";
        return {};
    }

    TaskProposal p;
    p.goal_item = goal;
    p.plan = std::move(plan);
    p.asserts.push_back(Assertion::produces(goal, 1));
    p.source_entry_id = source_entry_id;
    return {std::move(p)};
}

std::vector<TaskProposal> ExternalPolicy::propose(const IclContext& ctx, const WorldState& state,
                                                  const TechTree& tree) const {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        std::cerr << "external policy: pipe failed\n";
        return {};
    }
    const pid_t pid = fork();
    if (pid < 0) {
        std::cerr << "external policy: fork failed\n";
        return {};
    }
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);

    const std::string request = render_request(ctx, state);
    std::size_t written = 0;
    while (written < request.size()) {
        const ssize_t n =
            write(to_child[1], request.data() + written, request.size() - written);
        if (n <= 0) break;
        written += static_cast<std::size_t>(n);
    }
    close(to_child[1]);

    std::string reply;
    char buf[4096];
    ssize_t n;
    while ((n = read(from_child[0], buf, sizeof(buf))) > 0) reply.append(buf, static_cast<std::size_t>(n));
    close(from_child[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::cerr << "external policy: command exited with status " << status << "\n";
        return {};
    }
    return parse_reply(reply, tree, ctx.seed.entry_id);
}

}  // namespace echo
