#include "storyreel/domain.hpp"
#include "storyreel/errors.hpp"

#include <doctest.h>

#include <random>

using namespace storyreel;

namespace {

std::string rand_word(std::mt19937_64& rng) {
    static const char* words[] = {"ye", "cup", "rain", "gate", "é", "blue\"quote", "line\nbreak", ""};
    return words[rng() % 8];
}

Story random_story(std::mt19937_64& rng) {
    Story s;
    s.id = "story_" + std::to_string(rng() % 1000);
    s.raw_text = rand_word(rng) + " " + rand_word(rng);
    const int scenes = static_cast<int>(rng() % 3);
    for (int i = 0; i < scenes; ++i) {
        Scene sc;
        sc.id = "scene_0" + std::to_string(i + 1);
        sc.prompt = rand_word(rng);
        if (rng() % 2) sc.view_3d = "assets/" + sc.id;
        sc.span = {rng() % 10, 10 + rng() % 10};
        const int shots = static_cast<int>(rng() % 3);
        for (int k = 0; k < shots; ++k) {
            Shot sh;
            sh.id = sc.id + "_shot_0" + std::to_string(k + 1);
            sh.description = rand_word(rng);
            if (rng() % 2) sh.characters = {"char_a", "char_b"};
            sh.is_establishing = sh.characters.empty();
            sh.needs_layout = rng() % 2;
            sh.emotion = rng() % 2 ? "angry" : "neutral";
            if (rng() % 2) sh.dialogue = DialogueLine{"char_a", rand_word(rng)};
            sc.shots.push_back(sh);
        }
        s.scenes.push_back(sc);
    }
    s.characters = {{"char_a", "A", rand_word(rng)}};
    return s;
}

template <class T>
T round_trip(const T& v) {
    return json::parse(json(v).dump()).get<T>();
}

} // namespace

TEST_CASE("enum names round-trip and unknown names are rejected") {
    for (auto t : kAllTables) CHECK(parse_table(to_string(t)) == t);
    CHECK_FALSE(parse_table("storyboards").has_value());
    CHECK(parse_task_kind("evaluate") == TaskKind::evaluate);
    CHECK(parse_task_status("awaiting_review") == TaskStatus::awaiting_review);
    CHECK_FALSE(parse_verdict("maybe").has_value());
    CHECK_THROWS(json("nope").get<TaskKind>());
}

TEST_CASE("table columns follow the asset schema") {
    CHECK(table_columns(AssetTable::character) ==
          std::vector<std::string>{"id", "prompt", "demo_voice", "voice_prompt", "3d_view"});
    CHECK(table_columns(AssetTable::video) ==
          std::vector<std::string>{"id", "prompt", "video_path", "shot_id", "music_id"});
    CHECK(table_columns(AssetTable::music) == std::vector<std::string>{"id", "character_id", "prompt", "music_path"});
}

TEST_CASE("agents own task kinds") {
    CHECK(agent_for(TaskKind::storyboard) == agents::kStoryboard);
    CHECK(agent_for(TaskKind::evaluate) == agents::kEvaluator);
    CHECK(agent_for(TaskKind::edit) == agents::kEditor);
}

TEST_CASE("status transitions") {
    CHECK(is_valid_transition(TaskStatus::pending, TaskStatus::running));
    CHECK(is_valid_transition(TaskStatus::running, TaskStatus::awaiting_review));
    CHECK(is_valid_transition(TaskStatus::awaiting_review, TaskStatus::succeeded));
    CHECK(is_valid_transition(TaskStatus::succeeded, TaskStatus::awaiting_review));
    CHECK(is_valid_transition(TaskStatus::succeeded, TaskStatus::needs_revision));
    CHECK_FALSE(is_valid_transition(TaskStatus::awaiting_review, TaskStatus::pending));
    CHECK(is_valid_transition(TaskStatus::needs_revision, TaskStatus::pending));
    CHECK_FALSE(is_valid_transition(TaskStatus::pending, TaskStatus::succeeded));
    CHECK_FALSE(is_valid_transition(TaskStatus::failed, TaskStatus::pending));
    CHECK_FALSE(is_valid_transition(TaskStatus::succeeded, TaskStatus::running));
}

TEST_CASE("asset keys") {
    CHECK(asset_key(AssetTable::storyboard, "s1") == "storyboard/s1");
    CHECK(split_asset_key("music/mix_1") == std::pair{AssetTable::music, std::string("mix_1")});
    CHECK_THROWS_AS(split_asset_key("nope/x"), UnknownTable);
}

TEST_CASE("property: serialized values compare equal after a round trip") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        auto story = random_story(rng);
        CHECK(round_trip(story) == story);

        Task t;
        t.id = "storyboard:" + std::to_string(i);
        t.kind = static_cast<TaskKind>(rng() % 7);
        t.agent = std::string(agent_for(t.kind));
        t.payload = {{"prompt", rand_word(rng)}, {"n", static_cast<int>(rng() % 9)}};
        t.status = static_cast<TaskStatus>(rng() % 6);
        t.revision_count = static_cast<int>(rng() % 4);
        CHECK(round_trip(t) == t);

        AssetRecord r;
        r.table = AssetTable::scene;
        r.key_fields = {{"id", "scene_01"}, {"prompt", rand_word(rng)}, {"view_3d", ""}};
        r.meta = {{"digest", rand_word(rng)}};
        r.version = 1 + static_cast<int>(rng() % 5);
        r.producer = "SceneDesigner";
        r.branch = rng() % 2 ? "main" : "alt";
        r.seq = rng() % 100;
        r.origin = rng() % 2 ? "" : "rollback:1";
        CHECK(round_trip(r) == r);

        EvaluationReport e;
        e.task_id = t.id;
        e.text_similarity = static_cast<double>(rng() % 1000) / 999.0;
        e.identity_ok = rng() % 2;
        e.verdict = static_cast<Verdict>(rng() % 3);
        if (rng() % 2) e.recommended_tool = "layout_guided_generation";
        e.notes = {rand_word(rng)};
        CHECK(round_trip(e) == e);

        FinalManifest m;
        m.run_id = "run_x";
        m.entries.push_back({"s1", "video/v1", {"music/m1", "music/m2"}, rng() % 2 ? "fade" : "cut"});
        m.styles = {{"anime"}, {"orchestral"}};
        m.degraded_tasks = {"storyboard:s1"};
        CHECK(round_trip(m) == m);

        ToolDescriptor d{"tool_" + std::to_string(i), "f", {Capability::spatial_control}, {"p"}, {"c"}, 2,
                         AdapterSpec{"command", "cat"}};
        CHECK(round_trip(d) == d);
    }
}

TEST_CASE("graph validation accepts a DAG and rejects a seeded cycle") {
    WorkflowGraph g;
    g.nodes = {"a", "b", "c"};
    g.edges = {{"a", "b"}, {"b", "c"}};
    CHECK(validate_graph(g).empty());
    g.edges.insert({"c", "a"});
    CHECK_FALSE(validate_graph(g).empty());
    WorkflowGraph dangling;
    dangling.nodes = {"a"};
    dangling.edges = {{"a", "z"}};
    CHECK_FALSE(validate_graph(dangling).empty());
}

TEST_CASE("story validation") {
    Story s;
    s.raw_text = "  \n";
    CHECK(validate_story(s).empty());
    s.raw_text = "text";
    CHECK_FALSE(validate_story(s).empty());

    Scene sc;
    sc.id = "scene_01";
    sc.span = {0, 4};
    Shot sh;
    sh.id = "scene_01_shot_01";
    sh.is_establishing = true;
    sc.shots.push_back(sh);
    s.scenes.push_back(sc);
    CHECK(validate_story(s).empty());

    s.scenes[0].shots[0].characters = {"char_a"};
    CHECK_FALSE(validate_story(s).empty());
    s.scenes[0].shots[0].characters.clear();
    s.scenes[0].shots[0].id = "other_shot";
    CHECK_FALSE(validate_story(s).empty());
}

TEST_CASE("manifest validation wants every shot once in order") {
    Story s;
    Scene sc;
    sc.id = "scene_01";
    for (auto id : {"scene_01_a", "scene_01_b"}) {
        Shot sh;
        sh.id = id;
        sc.shots.push_back(sh);
    }
    s.scenes.push_back(sc);
    FinalManifest m;
    m.entries = {{"scene_01_a", "", {}, "cut"}, {"scene_01_b", "", {}, "cut"}};
    CHECK(validate_manifest(m, s).empty());
    std::swap(m.entries[0], m.entries[1]);
    CHECK_FALSE(validate_manifest(m, s).empty());
}
