#include "storyreel/registry.hpp"

#include "storyreel/errors.hpp"

#include <algorithm>
#include <fstream>

namespace storyreel {

std::vector<Capability> TaskRequirements::required() const {
    std::vector<Capability> out;
    if (is_establishing) out.push_back(Capability::empty_scene);
    if (needs_identity) out.push_back(Capability::identity_consistency);
    if (needs_spatial) out.push_back(Capability::spatial_control);
    return out;
}

void to_json(json& j, const TaskRequirements& v) {
    j = json{{"needs_identity", v.needs_identity},
             {"needs_spatial", v.needs_spatial},
             {"is_establishing", v.is_establishing},
             {"style_tags", v.style_tags}};
}

void from_json(const json& j, TaskRequirements& v) {
    v.needs_identity = j.value("needs_identity", false);
    v.needs_spatial = j.value("needs_spatial", false);
    v.is_establishing = j.value("is_establishing", false);
    v.style_tags = j.value("style_tags", std::vector<std::string>{});
}

void ToolRegistry::register_tool(std::string_view agent, ToolDescriptor descriptor) {
    if (descriptor.name.empty()) throw ConfigError("tool name must not be empty");
    auto& list = tools_[std::string(agent)];
    for (const auto& t : list)
        if (t.name == descriptor.name)
            throw DuplicateTool("agent " + std::string(agent) + " already has tool '" + descriptor.name + "'");
    list.push_back(std::move(descriptor));
}

const std::vector<ToolDescriptor>& ToolRegistry::tools(std::string_view agent) const {
    static const std::vector<ToolDescriptor> none;
    auto it = tools_.find(agent);
    return it == tools_.end() ? none : it->second;
}

const ToolDescriptor* ToolRegistry::find(std::string_view agent, std::string_view name) const {
    for (const auto& t : tools(agent))
        if (t.name == name) return &t;
    return nullptr;
}

std::vector<std::string> ToolRegistry::agents() const {
    std::vector<std::string> out;
    for (const auto& [agent, list] : tools_) out.push_back(agent);
    return out;
}

json ToolRegistry::to_json() const {
    json out = json::array();
    for (const auto& [agent, list] : tools_) {
        for (const auto& t : list) {
            json entry = t;
            entry["agent"] = agent;
            out.push_back(std::move(entry));
        }
    }
    return out;
}

ToolRegistry ToolRegistry::from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("tool registry must be a JSON array");
    ToolRegistry registry;
    for (const auto& entry : j) {
        try {
            registry.register_tool(entry.at("agent").get<std::string>(), entry.get<ToolDescriptor>());
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad tool registry entry: ") + e.what());
        }
    }
    return registry;
}

ToolRegistry ToolRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tool registry " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("tool registry " + path.string() + " is not valid JSON: " + e.what());
    }
}

ToolRegistry default_registry() {
    using C = Capability;
    auto tool = [](std::string name, std::string functionality, std::set<Capability> caps,
                   std::vector<std::string> pros, std::vector<std::string> cons, int cost) {
        return ToolDescriptor{std::move(name), std::move(functionality), std::move(caps),
                              std::move(pros), std::move(cons), cost, AdapterSpec{}};
    };
    ToolRegistry r;

    const std::string sb(agents::kStoryboard);
    r.register_tool(sb, tool("text_to_image", "Image straight from a text prompt; suits establishing and background shots",
                             {C::empty_scene}, {"simple interface", "good for empty establishing shots"},
                             {"weak layout control", "limited consistency across shots"}, 1));
    r.register_tool(sb, tool("reference_image_generation",
                             "Image conditioned on reference character sheets for identity consistency",
                             {C::identity_consistency}, {"keeps characters consistent", "good for dialogue panels"},
                             {"cannot produce empty establishing shots"}, 2));
    r.register_tool(sb, tool("layout_guided_generation", "Image following a predefined layout or bounding boxes",
                             {C::spatial_control, C::identity_consistency},
                             {"strong spatial control", "handles multi-character panels"},
                             {"higher complexity", "needs a layout design"}, 3));

    const std::string cd(agents::kCharacterDesigner);
    r.register_tool(cd, tool("text_to_image", "Initial character exploration from the description", {C::empty_scene},
                             {"fast design iteration"}, {"no identity guarantee"}, 1));
    r.register_tool(cd, tool("multi_view_synthesis", "Side and back views matching the canonical front view",
                             {C::identity_consistency}, {"multi-angle consistency"}, {"needs a front view"}, 2));
    r.register_tool(cd, tool("reference_image_generation", "Refinement conditioned on the canonical sheet",
                             {C::identity_consistency}, {"corrects visual drift"}, {"needs a reference"}, 3));

    const std::string sd(agents::kSceneDesigner);
    r.register_tool(sd, tool("depth_guided_generation", "Backgrounds with spatially coherent depth", {},
                             {"coherent perspective"}, {"coarse object placement"}, 1));
    r.register_tool(sd, tool("layout_guided_generation", "Backgrounds with explicit object placement",
                             {C::spatial_control}, {"precise furniture and prop placement"},
                             {"needs a layout design"}, 2));
    r.register_tool(sd, tool("text_to_image", "Broad establishing backgrounds", {C::empty_scene},
                             {"simple"}, {"little composition control"}, 3));
    r.register_tool(sd, tool("relighting_model", "Relights layered assets for lighting continuity", {},
                             {"temporal lighting consistency"}, {"post-process only"}, 4));

    const std::string an(agents::kAnimator);
    r.register_tool(an, tool("conditioned_video_generation",
                             "Video from keyframes, camera paths, poses and dialogue audio",
                             {C::identity_consistency}, {"keeps identity and style"}, {"needs keyframes"}, 1));

    const std::string au(agents::kAudio);
    r.register_tool(au, tool("speaker_conditioned_tts", "Character voices with emotion conditioning", {},
                             {"identity-preserving dialogue"}, {"needs a voice prompt"}, 1));
    r.register_tool(au, tool("text_to_music", "Scene music from text and acoustic style", {},
                             {"adapts to scene dynamics"}, {"no lyrics"}, 1));
    r.register_tool(au, tool("audio_mixer", "Balances dialogue, music and effects into one mix", {},
                             {"coherent output"}, {"no generation"}, 1));

    const std::string ed(agents::kEditor);
    r.register_tool(ed, tool("transition_effects", "Cuts and fades between shots", {}, {"automatic"}, {}, 1));
    r.register_tool(ed, tool("color_pipeline", "Global color grading", {}, {"visual consistency"}, {}, 1));
    r.register_tool(ed, tool("multipass_encoder", "Assembles the final cut manifest", {}, {"distribution ready"},
                             {}, 1));

    const std::string ev(agents::kEvaluator);
    r.register_tool(ev, tool("text_video_similarity", "Prompt alignment score", {}, {}, {}, 1));
    r.register_tool(ev, tool("identity_verification", "Identity token check against stored characters", {}, {}, {}, 1));
    r.register_tool(ev, tool("av_sync_check", "Video references the shot's audio mix", {}, {}, {}, 1));
    r.register_tool(ev, tool("narrative_evaluator", "Shot coverage check", {}, {}, {}, 1));
    return r;
}

std::vector<SelectionCandidate> explain_selection(const ToolRegistry& registry, std::string_view agent,
                                                  const TaskRequirements& requirements) {
    const auto& tools = registry.tools(agent);
    if (tools.empty()) throw NoTools("agent " + std::string(agent) + " has no registered tools");
    if (requirements.is_establishing && requirements.needs_identity)
        throw ContractViolation("a task cannot be both establishing and identity-bound");

    const auto required = requirements.required();
    std::vector<SelectionCandidate> out;
    for (const auto& t : tools) {
        SelectionCandidate c{t, {}, {}};
        for (auto cap : required) (t.capabilities.count(cap) ? c.matched : c.unmatched).push_back(cap);
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const SelectionCandidate& a, const SelectionCandidate& b) {
        if (a.covers_all() != b.covers_all()) return a.covers_all();
        if (a.matched.size() != b.matched.size()) return a.matched.size() > b.matched.size();
        if (a.tool.cost_rank != b.tool.cost_rank) return a.tool.cost_rank < b.tool.cost_rank;
        return a.tool.name < b.tool.name;
    });
    return out;
}

ToolDescriptor select_tool(const ToolRegistry& registry, std::string_view agent,
                           const TaskRequirements& requirements) {
    return explain_selection(registry, agent, requirements).front().tool;
}

} // namespace storyreel
