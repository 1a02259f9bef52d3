#include "fixtures.hpp"

#include "storyreel/errors.hpp"
#include "storyreel/registry.hpp"

#include <doctest.h>

using namespace storyreel;

namespace {

const std::string kSB(agents::kStoryboard);

TaskRequirements reqs(bool identity, bool spatial, bool establishing) {
    TaskRequirements r;
    r.needs_identity = identity;
    r.needs_spatial = spatial;
    r.is_establishing = establishing;
    return r;
}

// Independent oracle: among tools covering every required flag pick the cheapest, then
// by name; if none covers all, the most flags covered wins, then cost, then name.
std::string oracle_pick(const std::vector<ToolDescriptor>& tools, const TaskRequirements& r) {
    std::vector<Capability> need;
    if (r.is_establishing) need.push_back(Capability::empty_scene);
    if (r.needs_identity) need.push_back(Capability::identity_consistency);
    if (r.needs_spatial) need.push_back(Capability::spatial_control);
    const ToolDescriptor* best = nullptr;
    std::tuple<int, int, int, std::string> best_key;
    for (const auto& t : tools) {
        int hits = 0;
        for (auto c : need) hits += t.capabilities.count(c) ? 1 : 0;
        const int all = hits == static_cast<int>(need.size()) ? 0 : 1;
        std::tuple<int, int, int, std::string> key{all, -hits, t.cost_rank, t.name};
        if (!best || key < best_key) {
            best = &t;
            best_key = key;
        }
    }
    return best->name;
}

} // namespace

TEST_CASE("storyboard tool choice follows the shot's requirements") {
    const auto r = default_registry();
    CHECK(select_tool(r, kSB, reqs(false, false, true)).name == "text_to_image");
    CHECK(select_tool(r, kSB, reqs(true, false, false)).name == "reference_image_generation");
    CHECK(select_tool(r, kSB, reqs(true, true, false)).name == "layout_guided_generation");
    CHECK(select_tool(r, kSB, reqs(false, true, false)).name == "layout_guided_generation");
    // no tool covers both; the cheaper single match wins
    CHECK(select_tool(r, kSB, reqs(false, true, true)).name == "text_to_image");
    CHECK_THROWS_AS(select_tool(r, kSB, reqs(true, false, true)), ContractViolation);

    const auto ranked = explain_selection(r, kSB, reqs(true, true, false));
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].covers_all());
    CHECK(ranked[1].tool.name == "reference_image_generation");
    CHECK(ranked[1].unmatched == std::vector<Capability>{Capability::spatial_control});
}

TEST_CASE("property: selection agrees with the ranking oracle for every agent and flag combination") {
    const auto r = default_registry();
    for (const auto& agent : r.agents())
        for (int bits = 0; bits < 8; ++bits) {
            auto q = reqs(bits & 1, bits & 2, bits & 4);
            if (q.needs_identity && q.is_establishing) continue;
            CHECK(select_tool(r, agent, q).name == oracle_pick(r.tools(agent), q));
        }

    std::mt19937_64 rng(5);
    for (int round = 0; round < 200; ++round) {
        ToolRegistry reg;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            ToolDescriptor t;
            t.name = "tool_" + std::to_string(rng() % 100) + "_" + std::to_string(i);
            for (auto c : {Capability::empty_scene, Capability::identity_consistency, Capability::spatial_control})
                if (rng() % 2) t.capabilities.insert(c);
            t.cost_rank = 1 + static_cast<int>(rng() % 4);
            reg.register_tool("agent", t);
        }
        auto q = reqs(rng() % 2, rng() % 2, false);
        CHECK(select_tool(reg, "agent", q).name == oracle_pick(reg.tools("agent"), q));
    }
}

TEST_CASE("registry errors") {
    ToolRegistry r;
    CHECK_THROWS_AS(select_tool(r, kSB, {}), NoTools);
    ToolDescriptor t;
    t.name = "x";
    r.register_tool("a", t);
    CHECK_THROWS_AS(r.register_tool("a", t), DuplicateTool);
    r.register_tool("b", t);
    CHECK(r.find("a", "x") != nullptr);
    CHECK(r.find("a", "y") == nullptr);
    CHECK(r.tools("zzz").empty());
    CHECK_THROWS_AS(ToolRegistry::from_json(json::object()), ConfigError);
    CHECK_THROWS_AS(ToolRegistry::from_json(json::array({{{"name", "x"}}})), ConfigError);
    CHECK_THROWS_AS(ToolRegistry::load("/nonexistent/registry.json"), ConfigError);
}

TEST_CASE("registry JSON round trip and the shipped registry file") {
    const auto r = default_registry();
    CHECK(ToolRegistry::from_json(r.to_json()).to_json() == r.to_json());
    const auto shipped = ToolRegistry::load(fixtures::source_dir() / "data" / "default_registry.json");
    CHECK(shipped.to_json() == r.to_json());
    for (const auto& agent : {agents::kStoryboard, agents::kCharacterDesigner, agents::kSceneDesigner,
                              agents::kAnimator, agents::kAudio, agents::kEditor, agents::kEvaluator})
        CHECK_FALSE(r.tools(agent).empty());
}
