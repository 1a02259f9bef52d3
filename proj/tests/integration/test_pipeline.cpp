#include "fixtures.hpp"

#include "storyreel/config.hpp"
#include "storyreel/director.hpp"
#include "storyreel/errors.hpp"

#include <doctest.h>

using namespace storyreel;

namespace {

struct Run {
    std::shared_ptr<EventLog> log = std::make_shared<EventLog>();
    std::shared_ptr<AssetMemory> memory;
    std::unique_ptr<Director> director;
    Story story;
    FinalManifest manifest;
};

Run run_sample(const std::filesystem::path& memory_dir) {
    Run r;
    const auto config = load_config(fixtures::source_dir() / "data" / "sample" / "config.json");
    r.story = segment_story(fixtures::read_text(fixtures::source_dir() / "data" / "sample" / "story.txt"),
                            config.characters);
    r.memory = std::make_shared<AssetMemory>(memory_dir);
    r.director = std::make_unique<Director>(config, std::make_shared<const ToolRegistry>(registry_for(config)),
                                            default_agents(), r.log, r.memory);
    r.manifest = r.director->run(r.story);
    return r;
}

} // namespace

TEST_CASE("sample story end to end") {
    const auto dir = fixtures::temp_dir("integration");
    auto r = run_sample(dir);

    SUBCASE("manifest covers every shot in story order") {
        CHECK(validate_manifest(r.manifest, r.story).empty());
        std::vector<std::string> shots;
        for (const auto& sc : r.story.scenes)
            for (const auto& sh : sc.shots) shots.push_back(sh.id);
        REQUIRE(r.manifest.entries.size() == shots.size());
        for (std::size_t i = 0; i < shots.size(); ++i) {
            const auto& e = r.manifest.entries[i];
            CHECK(e.shot_id == shots[i]);
            CHECK(r.memory->find(AssetTable::video, "video_" + shots[i]).has_value());
            for (const auto& ref : e.audio_refs) {
                auto [table, id] = split_asset_key(ref);
                CHECK(r.memory->find(table, id).has_value());
            }
        }
        CHECK(r.manifest.styles.visual_style == std::vector<std::string>{"ink wash", "warm lighting"});
    }

    SUBCASE("every request is answered by its own agent") {
        std::map<std::string, std::string> requested;
        std::size_t answered = 0;
        for (const auto& e : r.log->snapshot()) {
            if (e.kind != "message") continue;
            const auto env = decode_value(e.payload.at("envelope"));
            if (e.payload.at("direction") == "request") {
                CHECK(env.is_request());
                requested[env.id] = env.meta.producer;
            } else {
                REQUIRE(requested.count(env.id));
                CHECK(requested.at(env.id) == env.meta.producer);
                CHECK(env.status == MessageStatus::success);
                ++answered;
            }
        }
        CHECK(answered == requested.size());
    }

    SUBCASE("transcript and memory survive a round trip through disk") {
        const auto file = dir / "transcript.jsonl";
        r.log->write_jsonl(file);
        const auto events = EventLog::read_jsonl(file);
        CHECK(events == r.log->snapshot());
        const auto p = replay(events);
        CHECK(p.completed);
        CHECK(p.manifest == r.manifest);
        for (const auto& [id, t] : r.director->tasks()) CHECK(p.tasks.at(id).status == t.status);

        AssetMemory reopened(dir);
        CHECK(reopened.log() == r.memory->log());
        CHECK(reopened.audit().empty());
        // the transcript's asset events carry the same versions as the store
        std::vector<AssetRecord> from_events;
        for (const auto& e : events)
            if (e.kind == "asset_stored") from_events.push_back(e.payload.at("record").get<AssetRecord>());
        CHECK(from_events == r.memory->log());
    }

    SUBCASE("the injected drift was revised exactly once") {
        const auto tasks = r.director->tasks();
        CHECK(tasks.at("storyboard:scene_01_shot_01").revision_count == 1);
        CHECK(tasks.at("character_design:char_ye").revision_count == 0);
        CHECK(r.manifest.degraded_tasks.empty());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("property: generated stories always produce valid manifests") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 25; ++i) {
        auto g = fixtures::random_script(rng, {3, 3, 3});
        auto config = fixtures::base_config(g.lexicon, rng());
        config.faults.rate = 0.15;
        const auto story = segment_story(g.text, g.lexicon);
        auto log = std::make_shared<EventLog>();
        const auto manifest = run_pipeline(story, config, log);
        CHECK(validate_manifest(manifest, story).empty());
        CHECK(manifest.entries.size() == story.shot_count());
        const auto p = replay(log->snapshot());
        CHECK(p.completed);
        for (const auto& [id, view] : p.tasks) CHECK(view.revision_count <= config.max_revisions);
    }
}
