#include "fixtures.hpp"

#include "storyreel/errors.hpp"
#include "storyreel/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

using namespace storyreel;
using namespace std::chrono_literals;

namespace {

struct LiveRun {
    std::shared_ptr<EventLog> log = std::make_shared<EventLog>();
    std::shared_ptr<Director> director;
    std::string run_id;

    explicit LiveRun(RunConfig config) {
        config.run_id = "run_test";
        run_id = config.run_id;
        director = std::make_shared<Director>(config, std::make_shared<const ToolRegistry>(default_registry()),
                                              default_agents(), log, std::make_shared<AssetMemory>());
    }
};

Story sample_story() { return segment_story(fixtures::sample_script(), fixtures::sample_lexicon()); }

struct Served {
    std::shared_ptr<RunStore> runs = std::make_shared<RunStore>();
    Service service{runs};
    int port = 0;
    void start() { port = service.start("127.0.0.1", 0); }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(30);
        return c;
    }
};

std::vector<json> parse_sse(const std::string& body) {
    std::vector<json> out;
    std::size_t pos = 0;
    while ((pos = body.find("data: ", pos)) != std::string::npos) {
        const auto end = body.find('\n', pos);
        out.push_back(json::parse(body.substr(pos + 6, end - pos - 6)));
        pos = end;
    }
    return out;
}

json get_json(httplib::Client& c, const std::string& path, int expect = 200) {
    auto res = c.Get(path);
    REQUIRE(res);
    CHECK_MESSAGE(res->status == expect, path);
    return json::parse(res->body);
}

int post(httplib::Client& c, const std::string& path, const std::string& body) {
    auto res = c.Post(path, body, "application/json");
    REQUIRE(res);
    return res->status;
}

} // namespace

TEST_CASE("listen addresses") {
    CHECK(parse_listen_address("127.0.0.1:9000") == std::pair<std::string, int>{"127.0.0.1", 9000});
    CHECK(parse_listen_address("localhost:0").second == 0);
    for (const char* bad : {"nohost", ":80", "h:", "h:99999", "h:8a"})
        CHECK_THROWS_AS(parse_listen_address(bad), ConfigError);
    ::setenv(kListenEnv, "0.0.0.0:7000", 1);
    CHECK(listen_address_from_env() == "0.0.0.0:7000");
    ::unsetenv(kListenEnv);
    CHECK(listen_address_from_env() == kDefaultListen);
}

TEST_CASE("finished run: graph, assets, reviews and the event backlog") {
    LiveRun run(fixtures::base_config(fixtures::sample_lexicon(), 5));
    const auto manifest = run.director->run(sample_story());
    Served s;
    s.runs->add(run.run_id, {run.log, run.director});
    s.start();
    auto c = s.client();

    CHECK(get_json(c, "/runs") == json::array({run.run_id}));
    const auto graph = get_json(c, "/runs/run_test/graph");
    CHECK(graph.at("state") == "completed");
    CHECK(graph.at("nodes").size() == run.director->tasks().size());
    CHECK(graph.at("edges").size() == run.director->graph().edges.size());
    for (const auto& n : graph.at("nodes")) CHECK(n.at("status") == "succeeded");

    const auto boards = get_json(c, "/runs/run_test/assets?table=storyboard");
    CHECK_FALSE(boards.empty());
    for (const auto& a : boards) CHECK(a.at("table") == "storyboard");
    CHECK(get_json(c, "/runs/run_test/assets").size() > boards.size());
    get_json(c, "/runs/run_test/assets?table=bogus", 400);
    CHECK(get_json(c, "/runs/run_test/reviews") == json::array());

    for (const char* path : {"/runs/nope/graph", "/runs/nope/assets", "/runs/nope/reviews", "/runs/nope/events"})
        get_json(c, path, 404);

    CHECK(post(c, "/runs/run_test/tasks/storyboard:scene_01_shot_01/decision", R"({"decision":"approve"})") == 409);
    CHECK(post(c, "/runs/run_test/tasks/storyboard:zzz/decision", R"({"decision":"approve"})") == 404);
    CHECK(post(c, "/runs/nope/tasks/x/decision", R"({"decision":"approve"})") == 404);
    CHECK(post(c, "/runs/run_test/tasks/storyboard:scene_01_shot_01/decision", "not json") == 400);
    CHECK(post(c, "/runs/run_test/tasks/storyboard:scene_01_shot_01/decision", R"({"decision":"maybe"})") == 400);
    CHECK(post(c, "/runs/run_test/tasks/storyboard:scene_01_shot_01/decision", R"({"decision":"override_tool"})") ==
          400);

    auto res = c.Get("/runs/run_test/events");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "text/event-stream");
    const auto frames = parse_sse(res->body);
    REQUIRE(frames.size() == run.log->size());
    for (std::size_t i = 0; i < frames.size(); ++i) CHECK(frames[i].at("seq") == i + 1);
    CHECK(frames.back().at("kind") == "run_completed");
    CHECK(frames.back().at("payload").at("manifest").get<FinalManifest>() == manifest);
    CHECK(res->body.find("id: 1\nevent: run_started\n") == 0);
}

TEST_CASE("transcript-only runs are read-only") {
    LiveRun run(fixtures::base_config(fixtures::sample_lexicon(), 5));
    run.director->run(sample_story());
    const auto dir = fixtures::temp_dir("transcripts");
    std::filesystem::create_directories(dir / "nested");
    run.log->write_jsonl(dir / "nested" / "transcript.jsonl");
    {
        std::ofstream junk(dir / "other.jsonl");
        junk << R"({"seq":1,"kind":"story","payload":{}})" << "\n";
    }

    Served s;
    CHECK(s.runs->load_transcripts(dir) == 1);
    CHECK_THROWS_AS(s.runs->load_transcripts(dir / "missing"), NotFound);
    s.start();
    auto c = s.client();
    CHECK(get_json(c, "/runs/run_test/graph").at("state") == "completed");
    CHECK(post(c, "/runs/run_test/tasks/storyboard:scene_01_shot_01/decision", R"({"decision":"approve"})") == 409);
    CHECK(parse_sse(c.Get("/runs/run_test/events")->body).size() == run.log->size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("live interactive run: reviews appear, decisions post, the stream follows to completion") {
    const std::string target = "storyboard:scene_01_shot_01";
    auto config = fixtures::base_config(fixtures::sample_lexicon(), 5);
    config.interactive = true;
    config.faults.targets[target] = 1;
    LiveRun run(config);
    Served s;
    s.runs->add(run.run_id, {run.log, run.director});
    s.start();

    auto streamed = std::async(std::launch::async, [&] {
        auto c = s.client();
        auto res = c.Get("/runs/run_test/events");
        return res ? res->body : std::string{};
    });
    auto done = std::async(std::launch::async, [&] { return run.director->run(sample_story()); });

    auto c = s.client();
    json reviews;
    for (int i = 0; i < 500 && reviews.empty(); ++i) {
        std::this_thread::sleep_for(20ms);
        reviews = get_json(c, "/runs/run_test/reviews");
    }
    REQUIRE(reviews.size() == 1);
    CHECK(reviews[0].at("task_id") == target);
    CHECK(reviews[0].at("report").at("verdict") == "revise");
    CHECK(get_json(c, "/runs/run_test/graph").at("state") == "running");

    const auto path = "/runs/run_test/tasks/" + target + "/decision";
    CHECK(post(c, path, R"({"decision":"override_tool","tool":"no_such_tool"})") == 400);
    CHECK(post(c, path, R"({"decision":"reject_with_note","note":"less clutter"})") == 202);
    CHECK(post(c, path, R"({"decision":"approve"})") == 409);

    const auto manifest = done.get();
    const auto frames = parse_sse(streamed.get());
    REQUIRE_FALSE(frames.empty());
    CHECK(frames.size() == run.log->size());
    CHECK(frames.back().at("kind") == "run_completed");
    CHECK(frames.back().at("payload").at("manifest").get<FinalManifest>() == manifest);
    CHECK(get_json(c, "/runs/run_test/graph").at("state") == "completed");
}
