#pragma once

#include "storyreel/domain.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace storyreel {

struct TaskRequirements {
    bool needs_identity = false;  // named reference characters appear
    bool needs_spatial = false;   // several characters or explicit layout
    bool is_establishing = false; // environment only
    std::vector<std::string> style_tags;

    std::vector<Capability> required() const;
};

void to_json(json& j, const TaskRequirements& v);
void from_json(const json& j, TaskRequirements& v);

/// Tools registered per agent, each carrying its capability flags, trade-offs and cost.
/// Populated at startup and read-only afterwards.
class ToolRegistry {
public:
    /// Throws DuplicateTool when `agent` already lists a tool with this name.
    void register_tool(std::string_view agent, ToolDescriptor descriptor);

    /// Tools of one agent in registration order; empty when the agent is unknown.
    const std::vector<ToolDescriptor>& tools(std::string_view agent) const;
    const ToolDescriptor* find(std::string_view agent, std::string_view name) const;
    std::vector<std::string> agents() const;

    /// Registry file form: a list of {agent, name, functionality, capabilities, pros, cons,
    /// cost_rank, adapter}.
    json to_json() const;
    static ToolRegistry from_json(const json& j);
    static ToolRegistry load(const std::filesystem::path& path);

private:
    std::map<std::string, std::vector<ToolDescriptor>, std::less<>> tools_;
};

/// Storyboard trio plus the tools of every specialized agent.
ToolRegistry default_registry();

struct SelectionCandidate {
    ToolDescriptor tool;
    std::vector<Capability> matched;
    std::vector<Capability> unmatched;
    bool covers_all() const noexcept { return unmatched.empty(); }
};

/// All tools of `agent` in preference order. Tools covering every required flag come
/// first (cheapest, then by name); the rest follow by number of flags covered, cost, name.
/// Throws NoTools.
std::vector<SelectionCandidate> explain_selection(const ToolRegistry& registry, std::string_view agent,
                                                  const TaskRequirements& requirements);

/// First entry of explain_selection.
ToolDescriptor select_tool(const ToolRegistry& registry, std::string_view agent,
                           const TaskRequirements& requirements);

} // namespace storyreel
