#pragma once
// Adapter that delegates proposal generation to an external process over a
// line-delimited stdio protocol: the rendered context plus a state digest go
// to the child's stdin, and the reply is one action per line in the grammar
//   GATHER <item> <n> | CRAFT <recipe> | SMELT <recipe> | PLACE <station>
// terminated by END. Malformed replies are discarded and noted on stderr.
// Disabled by default; never used by the acceptance suite.

#include <string>
#include <vector>

#include "echo/ical.hpp"

namespace echo {

class ExternalPolicy : public PolicyModel {
  public:
    explicit ExternalPolicy(std::string command) : command_(std::move(command)) {}

    std::vector<TaskProposal> propose(const IclContext& ctx, const WorldState& state,
                                      const TechTree& tree) const override;
    std::string name() const override { return "external:" + command_; }

    // The fixed request template (exposed for tests and for documentation).
    static std::string render_request(const IclContext& ctx, const WorldState& state);

    // Parse a reply into at most one proposal; the goal is the output of the
    // last craft/smelt line. Empty on malformed input.
    static std::vector<TaskProposal> parse_reply(const std::string& reply, const TechTree& tree,
                                                 std::uint64_t source_entry_id);

  private:
    std::string command_;
};

}  // namespace echo
