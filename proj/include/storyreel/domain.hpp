#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace storyreel {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Enumerations

enum class AssetTable { shot, scene, character, style, storyboard, video, music };
enum class TaskKind { character_design, scene_design, storyboard, animation, audio, edit, evaluate };
enum class TaskStatus { pending, running, succeeded, needs_revision, failed, awaiting_review };
enum class Capability { empty_scene, identity_consistency, spatial_control };
enum class Verdict { accept, revise, escalate };

std::string_view to_string(AssetTable t) noexcept;
std::string_view to_string(TaskKind k) noexcept;
std::string_view to_string(TaskStatus s) noexcept;
std::string_view to_string(Capability c) noexcept;
std::string_view to_string(Verdict v) noexcept;

std::optional<AssetTable> parse_table(std::string_view s) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view s) noexcept;
std::optional<TaskStatus> parse_task_status(std::string_view s) noexcept;
std::optional<Capability> parse_capability(std::string_view s) noexcept;
std::optional<Verdict> parse_verdict(std::string_view s) noexcept;

inline constexpr AssetTable kAllTables[] = {AssetTable::shot,       AssetTable::scene,
                                            AssetTable::character,  AssetTable::style,
                                            AssetTable::storyboard, AssetTable::video,
                                            AssetTable::music};

/// Column list of each asset memory table, in declaration order.
const std::vector<std::string>& table_columns(AssetTable t);

// ---------------------------------------------------------------------------
// Agents

namespace agents {
inline constexpr std::string_view kDirector = "Director";
inline constexpr std::string_view kCharacterDesigner = "CharacterDesigner";
inline constexpr std::string_view kSceneDesigner = "SceneDesigner";
inline constexpr std::string_view kStoryboard = "StoryboardAgent";
inline constexpr std::string_view kAnimator = "Animator";
inline constexpr std::string_view kAudio = "AudioProducer";
inline constexpr std::string_view kEditor = "VideoEditor";
inline constexpr std::string_view kEvaluator = "QualityEvaluator";
} // namespace agents

/// Agent responsible for executing tasks of the given kind.
std::string_view agent_for(TaskKind k) noexcept;

// ---------------------------------------------------------------------------
// Narrative decomposition

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const SourceSpan&) const = default;
};

struct DialogueLine {
    std::string speaker; // character id
    std::string text;
    bool operator==(const DialogueLine&) const = default;
};

struct Shot {
    std::string id;
    std::string description;
    std::vector<std::string> characters; // character ids, order of first appearance
    bool is_establishing = false;
    bool needs_layout = false;
    std::string emotion = "neutral";
    std::optional<DialogueLine> dialogue;
    bool operator==(const Shot&) const = default;
};

struct Scene {
    std::string id;
    std::string prompt;
    std::vector<Shot> shots;
    std::optional<std::string> view_3d;
    SourceSpan span;
    bool operator==(const Scene&) const = default;
};

struct CharacterProfile {
    std::string id;
    std::string name;
    std::string description;
    bool operator==(const CharacterProfile&) const = default;
};

struct Story {
    std::string id;
    std::string raw_text;
    std::vector<Scene> scenes;
    std::vector<CharacterProfile> characters;
    bool operator==(const Story&) const = default;

    const CharacterProfile* find_character(std::string_view id) const;
    std::size_t shot_count() const;
};

struct StyleVector {
    std::vector<std::string> visual_style;
    std::vector<std::string> acoustic_style;
    bool operator==(const StyleVector&) const = default;
};

// ---------------------------------------------------------------------------
// Tasks and the workflow graph

struct Task {
    std::string id;
    TaskKind kind = TaskKind::storyboard;
    std::string agent;
    json payload = json::object();
    TaskStatus status = TaskStatus::pending;
    int revision_count = 0;
    bool operator==(const Task&) const = default;
};

/// Whether `from -> to` is a legal status transition.
bool is_valid_transition(TaskStatus from, TaskStatus to) noexcept;

struct WorkflowGraph {
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges; // (from, to): from completes first
    bool operator==(const WorkflowGraph&) const = default;

    std::map<std::string, std::vector<std::string>> successors() const;
    std::map<std::string, std::vector<std::string>> predecessors() const;
};

// ---------------------------------------------------------------------------
// Asset memory rows

struct AssetRecord {
    AssetTable table = AssetTable::shot;
    std::map<std::string, std::string> key_fields; // exactly the table's columns
    json meta = json::object();                    // descriptor, digest, identity token...
    int version = 0;
    std::string producer;
    std::string branch = "main";
    std::uint64_t seq = 0; // store-wide logical timestamp
    std::string origin;    // empty for direct writes; "rollback:<v>" or "branch:<from>@<v>" for copies
    bool operator==(const AssetRecord&) const = default;

    std::string id() const;
    /// "table/id", the reference form used in envelopes and consumption maps.
    std::string key() const;
    /// Canonical bytes of the content (key fields + meta), independent of version bookkeeping.
    std::string content() const;
};

std::string asset_key(AssetTable table, std::string_view id);
std::pair<AssetTable, std::string> split_asset_key(std::string_view key);

// ---------------------------------------------------------------------------
// Tool descriptors

struct AdapterSpec {
    std::string kind = "mock"; // mock | command | http
    std::string target;        // command line or URL
    bool operator==(const AdapterSpec&) const = default;
};

struct ToolDescriptor {
    std::string name;
    std::string functionality;
    std::set<Capability> capabilities;
    std::vector<std::string> pros;
    std::vector<std::string> cons;
    int cost_rank = 1;
    AdapterSpec adapter;
    bool operator==(const ToolDescriptor&) const = default;
};

// ---------------------------------------------------------------------------
// Evaluation and the final manifest

struct EvaluationReport {
    std::string task_id;
    double text_similarity = 0.0;
    bool identity_ok = true;
    bool av_sync_ok = true;
    bool narrative_ok = true;
    Verdict verdict = Verdict::accept;
    std::optional<std::string> recommended_tool;
    std::vector<std::string> notes;
    bool operator==(const EvaluationReport&) const = default;
};

struct ManifestEntry {
    std::string shot_id;
    std::string video_ref;
    std::vector<std::string> audio_refs;
    std::string transition;
    bool operator==(const ManifestEntry&) const = default;
};

struct FinalManifest {
    std::string run_id;
    std::vector<ManifestEntry> entries;
    StyleVector styles;
    std::vector<std::string> degraded_tasks;
    bool operator==(const FinalManifest&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_story(const Story& story);
std::vector<std::string> validate_graph(const WorkflowGraph& graph);
std::vector<std::string> validate_manifest(const FinalManifest& manifest, const Story& story);

// ---------------------------------------------------------------------------
// JSON (snake_case objects)

void to_json(json& j, const SourceSpan& v);
void from_json(const json& j, SourceSpan& v);
void to_json(json& j, const DialogueLine& v);
void from_json(const json& j, DialogueLine& v);
void to_json(json& j, const Shot& v);
void from_json(const json& j, Shot& v);
void to_json(json& j, const Scene& v);
void from_json(const json& j, Scene& v);
void to_json(json& j, const CharacterProfile& v);
void from_json(const json& j, CharacterProfile& v);
void to_json(json& j, const Story& v);
void from_json(const json& j, Story& v);
void to_json(json& j, const StyleVector& v);
void from_json(const json& j, StyleVector& v);
void to_json(json& j, const Task& v);
void from_json(const json& j, Task& v);
void to_json(json& j, const WorkflowGraph& v);
void from_json(const json& j, WorkflowGraph& v);
void to_json(json& j, const AssetRecord& v);
void from_json(const json& j, AssetRecord& v);
void to_json(json& j, const AdapterSpec& v);
void from_json(const json& j, AdapterSpec& v);
void to_json(json& j, const ToolDescriptor& v);
void from_json(const json& j, ToolDescriptor& v);
void to_json(json& j, const EvaluationReport& v);
void from_json(const json& j, EvaluationReport& v);
void to_json(json& j, const ManifestEntry& v);
void from_json(const json& j, ManifestEntry& v);
void to_json(json& j, const FinalManifest& v);
void from_json(const json& j, FinalManifest& v);

void to_json(json& j, AssetTable v);
void from_json(const json& j, AssetTable& v);
void to_json(json& j, TaskKind v);
void from_json(const json& j, TaskKind& v);
void to_json(json& j, TaskStatus v);
void from_json(const json& j, TaskStatus& v);
void to_json(json& j, Capability v);
void from_json(const json& j, Capability& v);
void to_json(json& j, Verdict v);
void from_json(const json& j, Verdict& v);

} // namespace storyreel
