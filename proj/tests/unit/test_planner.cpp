#include "fixtures.hpp"

#include "storyreel/errors.hpp"
#include "storyreel/planner.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace storyreel;

namespace {

Plan sample_plan() {
    auto story = segment_story(fixtures::sample_script(), fixtures::sample_lexicon());
    return plan_tasks(story, derive_styles(story, {}));
}

bool has_edge(const Plan& p, const std::string& a, const std::string& b) { return p.graph.edges.count({a, b}) > 0; }

// Independent check: every edge's source sits in an earlier batch than its target.
bool respects_edges(const WorkflowGraph& g, const std::vector<Batch>& batches) {
    std::map<std::string, std::size_t> layer;
    for (std::size_t i = 0; i < batches.size(); ++i)
        for (const auto& n : batches[i]) {
            if (layer.count(n)) return false;
            layer[n] = i;
        }
    if (layer.size() != g.nodes.size()) return false;
    for (const auto& [a, b] : g.edges)
        if (layer.at(a) >= layer.at(b)) return false;
    return true;
}

} // namespace

TEST_CASE("empty story cannot be planned") {
    CHECK_THROWS_AS(plan_tasks(segment_story(""), {}), PlanningError);
}

TEST_CASE("sample plan has the expected tasks and dependencies") {
    auto p = sample_plan();
    const std::set<std::string> ids = p.graph.nodes;
    CHECK(ids.count("character_design:char_mira"));
    CHECK(ids.count("scene_design:scene_02"));
    CHECK(ids.count("storyboard:scene_01_shot_01"));
    CHECK(ids.count("audio:scene_01_shot_02"));
    CHECK(ids.count("edit:final_cut"));
    CHECK(ids.count("evaluate:edit:final_cut"));

    CHECK(has_edge(p, "character_design:char_mira", "storyboard:scene_01_shot_01"));
    CHECK(has_edge(p, "character_design:char_tomas", "storyboard:scene_01_shot_01"));
    CHECK_FALSE(has_edge(p, "character_design:char_tomas", "storyboard:scene_02_shot_02"));
    CHECK(has_edge(p, "scene_design:scene_01", "storyboard:scene_01_shot_02"));
    CHECK(has_edge(p, "storyboard:scene_01_shot_01", "animation:scene_01_shot_01"));
    CHECK(has_edge(p, "audio:scene_01_shot_01", "animation:scene_01_shot_01"));
    CHECK(has_edge(p, "character_design:char_tomas", "audio:scene_01_shot_02"));
    CHECK(has_edge(p, "animation:scene_02_shot_02", "edit:final_cut"));
    CHECK(has_edge(p, "storyboard:scene_01_shot_01", "evaluate:storyboard:scene_01_shot_01"));

    // one evaluation per producing task
    const auto producing = std::count_if(p.tasks.begin(), p.tasks.end(),
                                         [](const Task& t) { return t.kind != TaskKind::evaluate; });
    const auto evals = std::count_if(p.tasks.begin(), p.tasks.end(),
                                     [](const Task& t) { return t.kind == TaskKind::evaluate; });
    CHECK(producing == evals);
    for (const auto& t : p.tasks) {
        CHECK(t.agent == agent_for(t.kind));
        CHECK(t.status == TaskStatus::pending);
        CHECK(t.payload.contains("prompt"));
    }
}

TEST_CASE("schedule layers are sorted and respect edges") {
    auto p = sample_plan();
    auto batches = topological_schedule(p.graph);
    CHECK(respects_edges(p.graph, batches));
    for (const auto& b : batches) CHECK(std::is_sorted(b.begin(), b.end()));
    CHECK(batches.back() == Batch{"evaluate:edit:final_cut"});
}

TEST_CASE("a cycle is reported with its nodes") {
    WorkflowGraph g;
    g.nodes = {"a", "b", "c", "d"};
    g.edges = {{"a", "b"}, {"b", "c"}, {"c", "b"}, {"c", "d"}};
    try {
        topological_schedule(g);
        FAIL("expected a cycle error");
    } catch (const CycleError& e) {
        CHECK(e.nodes() == std::vector<std::string>{"b", "c"});
    }
}

TEST_CASE("descendants and localized revision") {
    WorkflowGraph g;
    g.nodes = {"cd", "sb1", "sb2", "an1", "an2", "ed"};
    g.edges = {{"cd", "sb1"}, {"cd", "sb2"}, {"sb1", "an1"}, {"sb2", "an2"}, {"an1", "ed"}, {"an2", "ed"}};
    CHECK(descendants(g, "sb1") == std::set<std::string>{"an1", "ed"});

    AssetFlow produced = {{"cd", {"character/c"}}, {"sb1", {"storyboard/p1"}}, {"sb2", {"storyboard/p2"}},
                          {"an1", {"video/v1"}},   {"an2", {"video/v2"}}};
    AssetFlow consumed = {{"sb1", {"character/c"}}, {"sb2", {"character/c"}}, {"an1", {"storyboard/p1"}},
                          {"an2", {"storyboard/p2"}}, {"ed", {"video/v1", "video/v2"}}};
    CHECK(localized_revision(g, "sb1", consumed, produced) == std::set<std::string>{"sb1", "an1", "ed"});
    // a descendant that did not read anything re-produced is left alone
    consumed["ed"] = {"video/v2"};
    CHECK(localized_revision(g, "sb1", consumed, produced) == std::set<std::string>{"sb1", "an1"});
    CHECK_THROWS_AS(localized_revision(g, "zz", consumed, produced), NotFound);
}

TEST_CASE("property: random stories plan into acyclic graphs with sound schedules") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        auto g = fixtures::random_script(rng);
        auto story = segment_story(g.text, g.lexicon);
        auto p = plan_tasks(story, derive_styles(story, {}));
        CHECK(validate_graph(p.graph).empty());
        CHECK(respects_edges(p.graph, topological_schedule(p.graph)));
        CHECK(p.graph.nodes.size() == p.tasks.size());
    }
}
