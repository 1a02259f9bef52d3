#include "fixtures.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome cli(const std::string& args) {
    const std::string cmd = std::string(STORYREEL_CLI) + " " + args + " 2>/dev/null";
    Outcome o;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
    const int status = ::pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path sample(const char* name) { return fixtures::source_dir() / "data" / "sample" / name; }

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = fixtures::read_text(e.path());
    return files;
}

} // namespace

TEST_CASE("run writes manifest, transcript and memory; same seed gives identical bytes") {
    const auto a = fixtures::temp_dir("cli_a"), b = fixtures::temp_dir("cli_b"), c = fixtures::temp_dir("cli_c");
    const auto base = "run " + q(sample("story.txt")) + " --config " + q(sample("config.json"));

    const auto first = cli(base + " --out " + q(a));
    CHECK(first.code == 0);
    CHECK(first.out.find("manifest.json") != std::string::npos);
    CHECK(fs::exists(a / "manifest.json"));
    CHECK(fs::exists(a / "transcript.jsonl"));
    CHECK(fs::exists(a / "memory" / "storyboard.jsonl"));

    const auto manifest = storyreel::json::parse(fixtures::read_text(a / "manifest.json"));
    CHECK_FALSE(manifest.at("entries").empty());
    CHECK(std::string_view(manifest.at("run_id").get<std::string>()).starts_with("run_"));

    CHECK(cli(base + " --out " + q(b)).code == 0);
    CHECK(tree(a) == tree(b));

    CHECK(cli(base + " --seed 8 --out " + q(c)).code == 0);
    CHECK(fixtures::read_text(a / "transcript.jsonl") != fixtures::read_text(c / "transcript.jsonl"));

    // re-running into the same directory replaces the previous memory
    CHECK(cli(base + " --out " + q(a)).code == 0);
    CHECK(tree(a) == tree(b));
    for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("usage and config problems exit 1, run failures exit 2") {
    const auto dir = fixtures::temp_dir("cli_err");
    CHECK(cli("").code == 1);
    CHECK(cli("run " + q(sample("story.txt"))).code == 1);
    CHECK(cli("run " + q(dir / "missing.txt") + " --config " + q(sample("config.json"))).code == 1);

    write(dir / "bad.json", "{ not json");
    CHECK(cli("run " + q(sample("story.txt")) + " --config " + q(dir / "bad.json") + " --out " + q(dir / "o")).code == 1);
    write(dir / "range.json", R"({"max_revisions": -1})");
    CHECK(cli("plan " + q(sample("story.txt")) + " --config " + q(dir / "range.json")).code == 1);

    write(dir / "strict.json", R"({"max_revisions": 0, "continue_on_degraded": false,
        "characters": ["Ye", "System AI"],
        "faults": {"targets": [{"task": "storyboard:scene_01_shot_01", "attempts": 1}]}})");
    const auto failed = cli("run " + q(sample("story.txt")) + " --config " + q(dir / "strict.json") + " --out " +
                            q(dir / "o2"));
    CHECK(failed.code == 2);
    const auto transcript = fixtures::read_text(dir / "o2" / "transcript.jsonl");
    CHECK(transcript.find("\"kind\":\"run_failed\"") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o2" / "manifest.json"));

    write(dir / "empty.txt", "\n\n");
    CHECK(cli("run " + q(dir / "empty.txt") + " --config " + q(sample("config.json")) + " --out " + q(dir / "o3"))
              .code == 2);
    fs::remove_all(dir);
}

TEST_CASE("plan prints the task graph and schedule") {
    const auto o = cli("plan " + q(sample("story.txt")) + " --config " + q(sample("config.json")));
    REQUIRE(o.code == 0);
    const auto j = storyreel::json::parse(o.out);
    CHECK(j.at("tasks").size() == j.at("graph").at("nodes").size());
    std::size_t scheduled = 0;
    for (const auto& batch : j.at("schedule")) scheduled += batch.size();
    CHECK(scheduled == j.at("tasks").size());
    CHECK(j.at("styles").at("visual_style").size() >= 1);
}
