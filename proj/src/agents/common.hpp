#pragma once

#include "storyreel/agents.hpp"

#include <memory>
#include <string>
#include <vector>

namespace storyreel::detail {

inline constexpr char kStyleId[] = "style_main";

/// Comma-separated tags, trimmed, empties dropped.
std::vector<std::string> split_tags(std::string_view joined);

/// Visual or acoustic tags of the run's style record; empty when none is stored.
std::vector<std::string> style_tags(TrackedReader& memory, bool acoustic);

/// "01", "02", ...
std::string two_digits(std::size_t n);

/// The request's tool_override when it names a tool of `agent`, else the registry's pick.
ToolDescriptor choose_tool(const AgentContext& ctx, std::string_view agent, const Envelope& request,
                           const TaskRequirements& requirements);

/// A tool of `agent` by name. Throws ConfigError when it is not registered.
const ToolDescriptor& named_tool(const AgentContext& ctx, std::string_view agent, std::string_view name);

bool has_capability(const ToolDescriptor& tool, Capability c);

json asset_meta(const MockAsset& asset);

std::shared_ptr<const Agent> make_character_designer();
std::shared_ptr<const Agent> make_scene_designer();
std::shared_ptr<const Agent> make_storyboard_agent();
std::shared_ptr<const Agent> make_animator();
std::shared_ptr<const Agent> make_audio_producer();
std::shared_ptr<const Agent> make_video_editor();
std::shared_ptr<const Agent> make_quality_evaluator();

} // namespace storyreel::detail
