#include "common.hpp"

#include "storyreel/digest.hpp"
#include "storyreel/errors.hpp"
#include "storyreel/text.hpp"

#include <cstdio>

namespace storyreel {

namespace detail {

std::vector<std::string> split_tags(std::string_view joined) {
    std::vector<std::string> tags;
    std::size_t start = 0;
    while (start <= joined.size()) {
        auto comma = joined.find(',', start);
        if (comma == std::string_view::npos) comma = joined.size();
        auto tag = text::trim(joined.substr(start, comma - start));
        if (!tag.empty()) tags.push_back(std::move(tag));
        start = comma + 1;
    }
    return tags;
}

std::vector<std::string> style_tags(TrackedReader& memory, bool acoustic) {
    auto rec = memory.find(AssetTable::style, kStyleId);
    if (!rec) return {};
    return split_tags(rec->key_fields.at(acoustic ? "acoustic_style" : "visual_style"));
}

std::string two_digits(std::size_t n) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02zu", n);
    return buf;
}

ToolDescriptor choose_tool(const AgentContext& ctx, std::string_view agent, const Envelope& request,
                           const TaskRequirements& requirements) {
    const auto& params = request.params();
    if (auto it = params.find("tool_override"); it != params.end() && it->is_string())
        if (const auto* tool = ctx.registry.find(agent, it->get<std::string>())) return *tool;
    return select_tool(ctx.registry, agent, requirements);
}

const ToolDescriptor& named_tool(const AgentContext& ctx, std::string_view agent, std::string_view name) {
    if (const auto* tool = ctx.registry.find(agent, name)) return *tool;
    throw ConfigError(std::string(agent) + " has no tool named " + std::string(name));
}

bool has_capability(const ToolDescriptor& tool, Capability c) { return tool.capabilities.count(c) > 0; }

json asset_meta(const MockAsset& asset) {
    return json{{"asset_id", asset.asset_id},
                {"kind", asset.kind},
                {"digest", asset.content_digest},
                {"descriptor", asset.descriptor}};
}

} // namespace detail

MockAsset AgentContext::invoke(const ToolDescriptor& tool, std::string asset_id, std::string kind, json params,
                               bool per_attempt) const {
    const std::string stream = per_attempt ? asset_id + "#" + std::to_string(attempt) : asset_id;
    const auto call_seed = mix_seed(seed, stream);
    if (faults.perturbs(task_id, attempt, seed)) params["prompt"] = "unrelated drifted content";
    auto adapter = make_adapter(tool.adapter);
    auto out = adapter->invoke(ToolInvocation{tool.name, std::move(params), call_seed});
    return MockAsset{std::move(asset_id), std::move(kind), std::move(out.descriptor), std::move(out.content_digest)};
}

AgentSet default_agents() {
    AgentSet set;
    for (auto agent : {detail::make_character_designer(), detail::make_scene_designer(),
                       detail::make_storyboard_agent(), detail::make_animator(), detail::make_audio_producer(),
                       detail::make_video_editor(), detail::make_quality_evaluator()})
        set.emplace(std::string(agent->name()), agent);
    return set;
}

void to_json(json& j, const LayoutBox& v) {
    j = json{{"object", v.object}, {"bbox", v.bbox}, {"notes", v.notes}};
}

void from_json(const json& j, LayoutBox& v) {
    j.at("object").get_to(v.object);
    j.at("bbox").get_to(v.bbox);
    v.notes = j.value("notes", std::string{});
}

void to_json(json& j, const StoryboardShot& v) {
    j = json{{"shot_id", v.shot_id}, {"tool", v.tool}, {"prompt", v.prompt}, {"notes", v.notes}};
    if (!v.reference_images.empty()) j["reference_images"] = v.reference_images;
    if (!v.layout_bboxes.empty()) j["layout_bboxes"] = v.layout_bboxes;
    if (v.layout) j["layout"] = *v.layout;
}

void from_json(const json& j, StoryboardShot& v) {
    j.at("shot_id").get_to(v.shot_id);
    j.at("tool").get_to(v.tool);
    j.at("prompt").get_to(v.prompt);
    v.reference_images = j.value("reference_images", std::vector<std::string>{});
    v.layout_bboxes = j.value("layout_bboxes", std::vector<LayoutBox>{});
    if (j.contains("layout")) v.layout = j.at("layout").get<std::string>();
    else v.layout.reset();
    v.notes = j.value("notes", std::string{});
}

void to_json(json& j, const CameraPlan& v) { j = json{{"angles", v.angles}, {"transitions", v.transitions}}; }

void from_json(const json& j, CameraPlan& v) {
    j.at("angles").get_to(v.angles);
    j.at("transitions").get_to(v.transitions);
}

} // namespace storyreel
