#include "storyreel/domain.hpp"

#include "storyreel/errors.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <queue>

namespace storyreel {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<E, N>& all) noexcept {
    for (E e : all)
        if (to_string(e) == s) return e;
    return std::nullopt;
}

constexpr std::array kTables = {AssetTable::shot,      AssetTable::scene,      AssetTable::character,
                                AssetTable::style,     AssetTable::storyboard, AssetTable::video,
                                AssetTable::music};
constexpr std::array kKinds = {TaskKind::character_design, TaskKind::scene_design, TaskKind::storyboard,
                               TaskKind::animation,        TaskKind::audio,        TaskKind::edit,
                               TaskKind::evaluate};
constexpr std::array kStatuses = {TaskStatus::pending,        TaskStatus::running,
                                  TaskStatus::succeeded,      TaskStatus::needs_revision,
                                  TaskStatus::failed,         TaskStatus::awaiting_review};
constexpr std::array kCapabilities = {Capability::empty_scene, Capability::identity_consistency,
                                      Capability::spatial_control};
constexpr std::array kVerdicts = {Verdict::accept, Verdict::revise, Verdict::escalate};

template <typename E>
E enum_from_json(const json& j, std::optional<E> (*parse)(std::string_view) noexcept,
                 const char* what) {
    const auto s = j.get<std::string>();
    if (auto e = parse(s)) return *e;
    throw json::other_error::create(501, std::string("unknown ") + what + " '" + s + "'", j);
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->template get<T>();
}

} // namespace

std::string_view to_string(AssetTable t) noexcept {
    switch (t) {
        case AssetTable::shot: return "shot";
        case AssetTable::scene: return "scene";
        case AssetTable::character: return "character";
        case AssetTable::style: return "style";
        case AssetTable::storyboard: return "storyboard";
        case AssetTable::video: return "video";
        case AssetTable::music: return "music";
    }
    return "?";
}

std::string_view to_string(TaskKind k) noexcept {
    switch (k) {
        case TaskKind::character_design: return "character_design";
        case TaskKind::scene_design: return "scene_design";
        case TaskKind::storyboard: return "storyboard";
        case TaskKind::animation: return "animation";
        case TaskKind::audio: return "audio";
        case TaskKind::edit: return "edit";
        case TaskKind::evaluate: return "evaluate";
    }
    return "?";
}

std::string_view to_string(TaskStatus s) noexcept {
    switch (s) {
        case TaskStatus::pending: return "pending";
        case TaskStatus::running: return "running";
        case TaskStatus::succeeded: return "succeeded";
        case TaskStatus::needs_revision: return "needs_revision";
        case TaskStatus::failed: return "failed";
        case TaskStatus::awaiting_review: return "awaiting_review";
    }
    return "?";
}

std::string_view to_string(Capability c) noexcept {
    switch (c) {
        case Capability::empty_scene: return "empty_scene";
        case Capability::identity_consistency: return "identity_consistency";
        case Capability::spatial_control: return "spatial_control";
    }
    return "?";
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::accept: return "accept";
        case Verdict::revise: return "revise";
        case Verdict::escalate: return "escalate";
    }
    return "?";
}

std::optional<AssetTable> parse_table(std::string_view s) noexcept { return parse_enum(s, kTables); }
std::optional<TaskKind> parse_task_kind(std::string_view s) noexcept { return parse_enum(s, kKinds); }
std::optional<TaskStatus> parse_task_status(std::string_view s) noexcept {
    return parse_enum(s, kStatuses);
}
std::optional<Capability> parse_capability(std::string_view s) noexcept {
    return parse_enum(s, kCapabilities);
}
std::optional<Verdict> parse_verdict(std::string_view s) noexcept { return parse_enum(s, kVerdicts); }

const std::vector<std::string>& table_columns(AssetTable t) {
    static const std::map<AssetTable, std::vector<std::string>> columns = {
        {AssetTable::shot, {"id", "description"}},
        {AssetTable::scene, {"id", "prompt", "view_3d"}},
        {AssetTable::character, {"id", "prompt", "demo_voice", "voice_prompt", "3d_view"}},
        {AssetTable::style, {"id", "visual_style", "acoustic_style"}},
        {AssetTable::storyboard, {"id", "prompt", "image_path"}},
        {AssetTable::video, {"id", "prompt", "video_path", "shot_id", "music_id"}},
        {AssetTable::music, {"id", "character_id", "prompt", "music_path"}},
    };
    return columns.at(t);
}

std::string_view agent_for(TaskKind k) noexcept {
    switch (k) {
        case TaskKind::character_design: return agents::kCharacterDesigner;
        case TaskKind::scene_design: return agents::kSceneDesigner;
        case TaskKind::storyboard: return agents::kStoryboard;
        case TaskKind::animation: return agents::kAnimator;
        case TaskKind::audio: return agents::kAudio;
        case TaskKind::edit: return agents::kEditor;
        case TaskKind::evaluate: return agents::kEvaluator;
    }
    return {};
}

const CharacterProfile* Story::find_character(std::string_view id) const {
    for (const auto& c : characters)
        if (c.id == id) return &c;
    return nullptr;
}

std::size_t Story::shot_count() const {
    std::size_t n = 0;
    for (const auto& s : scenes) n += s.shots.size();
    return n;
}

bool is_valid_transition(TaskStatus from, TaskStatus to) noexcept {
    using S = TaskStatus;
    switch (from) {
        case S::pending: return to == S::running;
        case S::running:
            return to == S::succeeded || to == S::needs_revision || to == S::failed ||
                   to == S::awaiting_review;
        case S::needs_revision: return to == S::pending;
        // a stored output can be invalidated by its evaluation or by an upstream revision,
        // or held for a human when an interactive evaluation asks for changes
        case S::succeeded: return to == S::needs_revision || to == S::awaiting_review;
        case S::awaiting_review: return to == S::succeeded || to == S::needs_revision;
        case S::failed: return false;
    }
    return false;
}

std::map<std::string, std::vector<std::string>> WorkflowGraph::successors() const {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& n : nodes) out[n];
    for (const auto& [a, b] : edges) out[a].push_back(b);
    return out;
}

std::map<std::string, std::vector<std::string>> WorkflowGraph::predecessors() const {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& n : nodes) out[n];
    for (const auto& [a, b] : edges) out[b].push_back(a);
    return out;
}

std::string AssetRecord::id() const {
    auto it = key_fields.find("id");
    return it == key_fields.end() ? std::string{} : it->second;
}

std::string AssetRecord::key() const { return asset_key(table, id()); }

std::string AssetRecord::content() const {
    json j;
    j["key_fields"] = key_fields;
    j["meta"] = meta;
    return j.dump();
}

std::string asset_key(AssetTable table, std::string_view id) {
    std::string k(to_string(table));
    k.push_back('/');
    k.append(id);
    return k;
}

std::pair<AssetTable, std::string> split_asset_key(std::string_view key) {
    const auto slash = key.find('/');
    if (slash == std::string_view::npos) throw UnknownTable("malformed asset key '" + std::string(key) + "'");
    auto table = parse_table(key.substr(0, slash));
    if (!table) throw UnknownTable("unknown table in asset key '" + std::string(key) + "'");
    return {*table, std::string(key.substr(slash + 1))};
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate_story(const Story& story) {
    std::vector<std::string> out;
    std::set<std::string> scene_ids;
    std::size_t expected_begin = 0;
    for (const auto& scene : story.scenes) {
        if (!scene_ids.insert(scene.id).second) out.push_back("duplicate scene id '" + scene.id + "'");
        if (scene.span.begin != expected_begin || scene.span.end < scene.span.begin)
            out.push_back("scene '" + scene.id + "' span does not continue the previous scene");
        expected_begin = scene.span.end;

        std::set<std::string> shot_ids;
        for (const auto& shot : scene.shots) {
            if (!shot_ids.insert(shot.id).second)
                out.push_back("duplicate shot id '" + shot.id + "' in scene '" + scene.id + "'");
            if (shot.id.rfind(scene.id + "_", 0) != 0)
                out.push_back("shot id '" + shot.id + "' is not prefixed by scene id '" + scene.id + "'");
            if (shot.is_establishing && !shot.characters.empty())
                out.push_back("establishing shot '" + shot.id + "' lists characters");
        }
    }
    if (story.scenes.empty()) {
        if (!std::all_of(story.raw_text.begin(), story.raw_text.end(),
                         [](unsigned char c) { return std::isspace(c) != 0; }))
            out.push_back("story has text but no scenes");
    } else if (expected_begin != story.raw_text.size()) {
        out.push_back("scene spans do not cover the story text");
    }
    return out;
}

std::vector<std::string> validate_graph(const WorkflowGraph& graph) {
    std::vector<std::string> out;
    std::map<std::string, int> indegree;
    for (const auto& n : graph.nodes) indegree[n] = 0;
    for (const auto& [a, b] : graph.edges) {
        bool ok = true;
        if (!graph.nodes.count(a)) {
            out.push_back("edge source '" + a + "' is not a node");
            ok = false;
        }
        if (!graph.nodes.count(b)) {
            out.push_back("edge target '" + b + "' is not a node");
            ok = false;
        }
        if (ok) ++indegree[b];
    }
    if (!out.empty()) return out;

    auto succ = graph.successors();
    std::queue<std::string> ready;
    for (const auto& [n, d] : indegree)
        if (d == 0) ready.push(n);
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto n = ready.front();
        ready.pop();
        ++visited;
        for (const auto& m : succ[n])
            if (--indegree[m] == 0) ready.push(m);
    }
    if (visited != graph.nodes.size()) out.push_back("graph contains a cycle");
    return out;
}

std::vector<std::string> validate_manifest(const FinalManifest& manifest, const Story& story) {
    std::vector<std::string> out;
    std::vector<std::string> expected;
    for (const auto& scene : story.scenes)
        for (const auto& shot : scene.shots) expected.push_back(shot.id);
    std::vector<std::string> actual;
    for (const auto& e : manifest.entries) actual.push_back(e.shot_id);
    if (actual != expected) out.push_back("manifest entries do not list every shot once in story order");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, AssetTable v) { j = std::string(to_string(v)); }
void from_json(const json& j, AssetTable& v) { v = enum_from_json<AssetTable>(j, parse_table, "table"); }
void to_json(json& j, TaskKind v) { j = std::string(to_string(v)); }
void from_json(const json& j, TaskKind& v) { v = enum_from_json<TaskKind>(j, parse_task_kind, "task kind"); }
void to_json(json& j, TaskStatus v) { j = std::string(to_string(v)); }
void from_json(const json& j, TaskStatus& v) {
    v = enum_from_json<TaskStatus>(j, parse_task_status, "task status");
}
void to_json(json& j, Capability v) { j = std::string(to_string(v)); }
void from_json(const json& j, Capability& v) {
    v = enum_from_json<Capability>(j, parse_capability, "capability");
}
void to_json(json& j, Verdict v) { j = std::string(to_string(v)); }
void from_json(const json& j, Verdict& v) { v = enum_from_json<Verdict>(j, parse_verdict, "verdict"); }

void to_json(json& j, const SourceSpan& v) { j = json{{"begin", v.begin}, {"end", v.end}}; }
void from_json(const json& j, SourceSpan& v) {
    j.at("begin").get_to(v.begin);
    j.at("end").get_to(v.end);
}

void to_json(json& j, const DialogueLine& v) { j = json{{"speaker", v.speaker}, {"text", v.text}}; }
void from_json(const json& j, DialogueLine& v) {
    j.at("speaker").get_to(v.speaker);
    j.at("text").get_to(v.text);
}

void to_json(json& j, const Shot& v) {
    j = json{{"id", v.id},
             {"description", v.description},
             {"characters", v.characters},
             {"is_establishing", v.is_establishing},
             {"needs_layout", v.needs_layout},
             {"emotion", v.emotion}};
    put_optional(j, "dialogue", v.dialogue);
}
void from_json(const json& j, Shot& v) {
    j.at("id").get_to(v.id);
    j.at("description").get_to(v.description);
    j.at("characters").get_to(v.characters);
    j.at("is_establishing").get_to(v.is_establishing);
    j.at("needs_layout").get_to(v.needs_layout);
    v.emotion = j.value("emotion", std::string("neutral"));
    v.dialogue = get_optional<DialogueLine>(j, "dialogue");
}

void to_json(json& j, const Scene& v) {
    j = json{{"id", v.id}, {"prompt", v.prompt}, {"shots", v.shots}, {"span", v.span}};
    put_optional(j, "view_3d", v.view_3d);
}
void from_json(const json& j, Scene& v) {
    j.at("id").get_to(v.id);
    j.at("prompt").get_to(v.prompt);
    j.at("shots").get_to(v.shots);
    j.at("span").get_to(v.span);
    v.view_3d = get_optional<std::string>(j, "view_3d");
}

void to_json(json& j, const CharacterProfile& v) {
    j = json{{"id", v.id}, {"name", v.name}, {"description", v.description}};
}
void from_json(const json& j, CharacterProfile& v) {
    j.at("id").get_to(v.id);
    j.at("name").get_to(v.name);
    v.description = j.value("description", std::string{});
}

void to_json(json& j, const Story& v) {
    j = json{{"id", v.id}, {"raw_text", v.raw_text}, {"scenes", v.scenes}, {"characters", v.characters}};
}
void from_json(const json& j, Story& v) {
    j.at("id").get_to(v.id);
    j.at("raw_text").get_to(v.raw_text);
    j.at("scenes").get_to(v.scenes);
    v.characters = j.value("characters", std::vector<CharacterProfile>{});
}

void to_json(json& j, const StyleVector& v) {
    j = json{{"visual_style", v.visual_style}, {"acoustic_style", v.acoustic_style}};
}
void from_json(const json& j, StyleVector& v) {
    j.at("visual_style").get_to(v.visual_style);
    j.at("acoustic_style").get_to(v.acoustic_style);
}

void to_json(json& j, const Task& v) {
    j = json{{"id", v.id},         {"kind", v.kind},     {"agent", v.agent},
             {"payload", v.payload}, {"status", v.status}, {"revision_count", v.revision_count}};
}
void from_json(const json& j, Task& v) {
    j.at("id").get_to(v.id);
    j.at("kind").get_to(v.kind);
    j.at("agent").get_to(v.agent);
    v.payload = j.value("payload", json::object());
    v.status = j.value("status", TaskStatus::pending);
    v.revision_count = j.value("revision_count", 0);
}

void to_json(json& j, const WorkflowGraph& v) {
    json edges = json::array();
    for (const auto& [a, b] : v.edges) edges.push_back(json::array({a, b}));
    j = json{{"nodes", v.nodes}, {"edges", std::move(edges)}};
}
void from_json(const json& j, WorkflowGraph& v) {
    v.nodes = j.at("nodes").get<std::set<std::string>>();
    v.edges.clear();
    for (const auto& e : j.at("edges")) v.edges.emplace(e.at(0).get<std::string>(), e.at(1).get<std::string>());
}

void to_json(json& j, const AssetRecord& v) {
    j = json{{"table", v.table},     {"key_fields", v.key_fields}, {"meta", v.meta},
             {"version", v.version}, {"producer", v.producer},     {"branch", v.branch},
             {"seq", v.seq}};
    if (!v.origin.empty()) j["origin"] = v.origin;
}
void from_json(const json& j, AssetRecord& v) {
    j.at("table").get_to(v.table);
    j.at("key_fields").get_to(v.key_fields);
    v.meta = j.value("meta", json::object());
    j.at("version").get_to(v.version);
    j.at("producer").get_to(v.producer);
    v.branch = j.value("branch", std::string("main"));
    v.seq = j.value("seq", std::uint64_t{0});
    v.origin = j.value("origin", std::string{});
}

void to_json(json& j, const AdapterSpec& v) {
    j = json{{"kind", v.kind}};
    if (!v.target.empty()) j["target"] = v.target;
}
void from_json(const json& j, AdapterSpec& v) {
    v.kind = j.value("kind", std::string("mock"));
    v.target = j.value("target", std::string{});
}

void to_json(json& j, const ToolDescriptor& v) {
    j = json{{"name", v.name},           {"functionality", v.functionality},
             {"capabilities", v.capabilities}, {"pros", v.pros},
             {"cons", v.cons},           {"cost_rank", v.cost_rank},
             {"adapter", v.adapter}};
}
void from_json(const json& j, ToolDescriptor& v) {
    j.at("name").get_to(v.name);
    v.functionality = j.value("functionality", std::string{});
    v.capabilities = j.value("capabilities", std::set<Capability>{});
    v.pros = j.value("pros", std::vector<std::string>{});
    v.cons = j.value("cons", std::vector<std::string>{});
    v.cost_rank = j.value("cost_rank", 1);
    v.adapter = j.value("adapter", AdapterSpec{});
}

void to_json(json& j, const EvaluationReport& v) {
    j = json{{"task_id", v.task_id},         {"text_similarity", v.text_similarity},
             {"identity_ok", v.identity_ok}, {"av_sync_ok", v.av_sync_ok},
             {"narrative_ok", v.narrative_ok}, {"verdict", v.verdict},
             {"notes", v.notes}};
    put_optional(j, "recommended_tool", v.recommended_tool);
}
void from_json(const json& j, EvaluationReport& v) {
    j.at("task_id").get_to(v.task_id);
    j.at("text_similarity").get_to(v.text_similarity);
    j.at("identity_ok").get_to(v.identity_ok);
    j.at("av_sync_ok").get_to(v.av_sync_ok);
    j.at("narrative_ok").get_to(v.narrative_ok);
    j.at("verdict").get_to(v.verdict);
    v.recommended_tool = get_optional<std::string>(j, "recommended_tool");
    v.notes = j.value("notes", std::vector<std::string>{});
}

void to_json(json& j, const ManifestEntry& v) {
    j = json{{"shot_id", v.shot_id},
             {"video_ref", v.video_ref},
             {"audio_refs", v.audio_refs},
             {"transition", v.transition}};
}
void from_json(const json& j, ManifestEntry& v) {
    j.at("shot_id").get_to(v.shot_id);
    j.at("video_ref").get_to(v.video_ref);
    j.at("audio_refs").get_to(v.audio_refs);
    j.at("transition").get_to(v.transition);
}

void to_json(json& j, const FinalManifest& v) {
    j = json{{"run_id", v.run_id},
             {"entries", v.entries},
             {"styles", v.styles},
             {"degraded_tasks", v.degraded_tasks}};
}
void from_json(const json& j, FinalManifest& v) {
    j.at("run_id").get_to(v.run_id);
    j.at("entries").get_to(v.entries);
    j.at("styles").get_to(v.styles);
    v.degraded_tasks = j.value("degraded_tasks", std::vector<std::string>{});
}

CycleError::CycleError(std::vector<std::string> nodes)
    : Error([&] {
          std::string msg = "cycle detected among tasks:";
          for (const auto& n : nodes) msg += " " + n;
          return msg;
      }()),
      nodes_(std::move(nodes)) {}

} // namespace storyreel
