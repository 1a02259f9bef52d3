#pragma once

#include "storyreel/asset_memory.hpp"
#include "storyreel/protocol.hpp"
#include "storyreel/registry.hpp"
#include "storyreel/tools.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace storyreel {

struct EvaluationThresholds {
    double text_similarity = 0.8;
};

/// Everything an agent may touch while executing one request. Agents keep no state of
/// their own between requests.
struct AgentContext {
    TrackedReader& memory;
    const ToolRegistry& registry;
    std::uint64_t seed = 0;
    std::string task_id{};
    int attempt = 1;
    FaultPlan faults{};
    EvaluationThresholds thresholds{};
    double seconds_per_panel = 2.0;

    /// Calls the tool's adapter. The per-call seed is derived from the run seed, the asset
    /// id and (unless `per_attempt` is false) the attempt; a fault plan hit swaps the prompt
    /// for unrelated text.
    MockAsset invoke(const ToolDescriptor& tool, std::string asset_id, std::string kind, json params,
                     bool per_attempt = true) const;
};

struct AgentOutput {
    Envelope response;
    std::vector<AssetRecord> records; // stored by the director with producer = agent
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string_view name() const noexcept = 0;
    virtual AgentOutput execute(const Envelope& request, AgentContext& context) const = 0;
};

using AgentSet = std::map<std::string, std::shared_ptr<const Agent>, std::less<>>;

/// One instance of each specialized agent, keyed by agent name.
AgentSet default_agents();

// ---------------------------------------------------------------------------
// Storyboard

struct LayoutBox {
    std::string object;
    std::array<int, 4> bbox{}; // x1, y1, x2, y2
    std::string notes;
    bool operator==(const LayoutBox&) const = default;
};

struct StoryboardShot {
    std::string shot_id;
    std::string tool;
    std::string prompt;
    std::vector<std::string> reference_images;
    std::vector<LayoutBox> layout_bboxes;
    std::optional<std::string> layout;
    std::string notes;
    bool operator==(const StoryboardShot&) const = default;
};

struct CameraPlan {
    std::vector<int> angles;
    std::vector<std::string> transitions;
    bool operator==(const CameraPlan&) const = default;
};

/// A storyboard panel before tool selection.
struct PanelPlan {
    std::string prompt;
    std::vector<std::string> characters; // ids, roster order
    TaskRequirements requirements;
    bool reaction = false;
};

struct NamedCharacter {
    std::string id;
    std::string name;
};

inline constexpr std::size_t kMaxPanels = 4;

/// Splits a shot description into 1..4 panels on clause boundaries. A leading setting
/// clause ("In the hall") joins the clause after it; participle and "and"/"with" clauses
/// continue the current panel; a pronoun pulls in the previous panel's lead character.
/// An emotional exchange between two characters gets a close-up reaction panel when
/// there is room for one.
std::vector<PanelPlan> plan_panels(std::string_view description, const std::vector<NamedCharacter>& characters,
                                   bool split_clauses = true);

/// Angles cycle through 30, 45, 60 degrees; a scene's opening panel fades in, everything
/// else cuts.
CameraPlan plan_camera(std::size_t panels, bool scene_opening);

/// Evenly spaced character boxes on a 1000x1000 canvas, or one full-frame environment box.
std::vector<LayoutBox> layout_boxes(const std::vector<std::string>& names);

// ---------------------------------------------------------------------------
// Evaluation

struct EvaluationContext {
    double similarity_threshold = 0.8;
    std::map<std::string, std::string> known_identities; // character id -> stored token
    const ToolRegistry* registry = nullptr;
    std::string producing_agent;
};

/// Token-set overlap of the requested prompt found in the descriptor prompt; 1 for an empty request.
double text_similarity(std::string_view descriptor_prompt, std::string_view spec_prompt);

/// Deterministic quality check of a produced asset against the payload of the task that
/// produced it. Problems are report contents, never exceptions.
EvaluationReport evaluate(const MockAsset& asset, const json& spec, const EvaluationContext& context);

void to_json(json& j, const LayoutBox& v);
void from_json(const json& j, LayoutBox& v);
void to_json(json& j, const StoryboardShot& v);
void from_json(const json& j, StoryboardShot& v);
void to_json(json& j, const CameraPlan& v);
void from_json(const json& j, CameraPlan& v);

} // namespace storyreel
