#include "storyreel/planner.hpp"

#include "storyreel/errors.hpp"
#include "storyreel/text.hpp"

#include <algorithm>
#include <deque>

namespace storyreel {

namespace task_ids {
std::string character_design(std::string_view id) { return "character_design:" + std::string(id); }
std::string scene_design(std::string_view id) { return "scene_design:" + std::string(id); }
std::string storyboard(std::string_view id) { return "storyboard:" + std::string(id); }
std::string animation(std::string_view id) { return "animation:" + std::string(id); }
std::string audio(std::string_view id) { return "audio:" + std::string(id); }
std::string edit() { return "edit:final_cut"; }
std::string evaluate(std::string_view target) { return "evaluate:" + std::string(target); }
} // namespace task_ids

namespace {

Task make_task(std::string id, TaskKind kind, json payload) {
    Task t;
    t.id = std::move(id);
    t.kind = kind;
    t.agent = std::string(agent_for(kind));
    t.payload = std::move(payload);
    return t;
}

std::string style_requirement(const StyleVector& styles, bool acoustic) {
    const auto& tags = acoustic ? styles.acoustic_style : styles.visual_style;
    return "style: should be " + text::join(tags, ", ");
}

} // namespace

Plan plan_tasks(const Story& story, const StyleVector& styles) {
    if (story.scenes.empty()) throw PlanningError("empty story");

    Plan plan;
    std::vector<std::string> producing;
    auto add = [&](Task t) {
        plan.graph.nodes.insert(t.id);
        producing.push_back(t.id);
        plan.tasks.push_back(std::move(t));
    };
    auto edge = [&](const std::string& a, const std::string& b) { plan.graph.edges.emplace(a, b); };

    std::set<std::string> featured;
    for (const auto& scene : story.scenes)
        for (const auto& shot : scene.shots) featured.insert(shot.characters.begin(), shot.characters.end());

    for (const auto& c : story.characters) {
        if (!featured.count(c.id)) continue;
        add(make_task(task_ids::character_design(c.id), TaskKind::character_design,
                      {{"character_id", c.id},
                       {"name", c.name},
                       {"description", c.description},
                       {"prompt", c.description.empty() ? c.name : c.name + ", " + c.description},
                       {"requirement", style_requirement(styles, false)}}));
    }

    std::vector<std::string> shot_order;
    for (const auto& scene : story.scenes) {
        const auto sd = task_ids::scene_design(scene.id);
        add(make_task(sd, TaskKind::scene_design,
                      {{"scene_id", scene.id},
                       {"prompt", scene.prompt},
                       {"requirement", style_requirement(styles, false)}}));

        for (std::size_t i = 0; i < scene.shots.size(); ++i) {
            const auto& shot = scene.shots[i];
            shot_order.push_back(shot.id);
            const auto sb = task_ids::storyboard(shot.id);
            const auto an = task_ids::animation(shot.id);
            const auto au = task_ids::audio(shot.id);

            json names = json::object();
            for (const auto& c : shot.characters)
                if (const auto* profile = story.find_character(c)) names[c] = profile->name;
            add(make_task(sb, TaskKind::storyboard,
                          {{"shot_id", shot.id},
                           {"character_names", names},
                           {"is_dialogue", shot.dialogue.has_value()},
                           {"scene_id", scene.id},
                           {"prompt", shot.description},
                           {"characters", shot.characters},
                           {"needs_layout", shot.needs_layout},
                           {"is_establishing", shot.is_establishing},
                           {"scene_opening", i == 0},
                           {"requirement", style_requirement(styles, false)}}));

            json lines = json::array();
            if (shot.dialogue)
                lines.push_back({{"character_id", shot.dialogue->speaker},
                                 {"text", shot.dialogue->text},
                                 {"emotion", shot.emotion}});
            add(make_task(au, TaskKind::audio,
                          {{"shot_id", shot.id},
                           {"scene_id", scene.id},
                           {"scene_prompt", scene.prompt},
                           {"lines", lines},
                           {"prompt", shot.dialogue ? shot.dialogue->text : scene.prompt},
                           {"requirement", style_requirement(styles, true)}}));

            add(make_task(an, TaskKind::animation,
                          {{"shot_id", shot.id},
                           {"prompt", shot.description},
                           {"lip_sync", shot.dialogue.has_value()},
                           {"mix_id", "mix_" + shot.id},
                           {"needs_layout", shot.needs_layout},
                           {"requirement", style_requirement(styles, false)}}));

            for (const auto& c : shot.characters) edge(task_ids::character_design(c), sb);
            if (shot.dialogue) edge(task_ids::character_design(shot.dialogue->speaker), au);
            edge(sd, sb);
            edge(sb, an);
            edge(au, an);
            edge(an, task_ids::edit());
            edge(au, task_ids::edit());
        }
    }

    add(make_task(task_ids::edit(), TaskKind::edit,
                  {{"shots", shot_order},
                   {"story_id", story.id},
                   {"prompt", "final cut of " + story.id},
                   {"requirement", style_requirement(styles, false)}}));

    for (const auto& target : producing) {
        const auto& t = *std::find_if(plan.tasks.begin(), plan.tasks.end(),
                                      [&](const Task& x) { return x.id == target; });
        auto payload = t.payload;
        payload["target"] = target;
        payload["target_kind"] = t.kind;
        payload["target_agent"] = t.agent;
        auto ev = make_task(task_ids::evaluate(target), TaskKind::evaluate, std::move(payload));
        plan.graph.nodes.insert(ev.id);
        edge(target, ev.id);
        plan.tasks.push_back(std::move(ev));
    }

    if (auto problems = validate_graph(plan.graph); !problems.empty())
        throw PlanningError("planned graph is invalid: " + problems.front());
    return plan;
}

std::vector<Batch> topological_schedule(const WorkflowGraph& graph) {
    if (auto problems = validate_graph(graph); !problems.empty()) {
        for (const auto& [a, b] : graph.edges)
            if (!graph.nodes.count(a) || !graph.nodes.count(b)) throw PlanningError(problems.front());
    }

    auto succ = graph.successors();
    std::map<std::string, int> indegree;
    for (const auto& n : graph.nodes) indegree[n] = 0;
    for (const auto& [a, b] : graph.edges) ++indegree[b];

    std::vector<Batch> batches;
    Batch current;
    for (const auto& [n, d] : indegree)
        if (d == 0) current.push_back(n);
    std::size_t scheduled = 0;
    while (!current.empty()) {
        std::sort(current.begin(), current.end());
        Batch next;
        for (const auto& n : current)
            for (const auto& m : succ[n])
                if (--indegree[m] == 0) next.push_back(m);
        scheduled += current.size();
        batches.push_back(std::move(current));
        current = std::move(next);
    }
    if (scheduled == graph.nodes.size()) return batches;

    // Every unscheduled node lies on or downstream of a cycle; walk forward inside the
    // unscheduled set until a node repeats.
    std::set<std::string> remaining;
    for (const auto& [n, d] : indegree)
        if (d > 0) remaining.insert(n);
    std::vector<std::string> path;
    std::map<std::string, std::size_t> seen;
    std::string node = *remaining.begin();
    while (!seen.count(node)) {
        seen[node] = path.size();
        path.push_back(node);
        std::string next;
        for (const auto& m : succ[node])
            if (remaining.count(m)) {
                next = m;
                break;
            }
        node = next;
    }
    std::vector<std::string> cycle(path.begin() + static_cast<std::ptrdiff_t>(seen[node]), path.end());
    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
    throw CycleError(std::move(cycle));
}

std::set<std::string> descendants(const WorkflowGraph& graph, const std::string& from) {
    auto succ = graph.successors();
    std::set<std::string> out;
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        for (const auto& m : succ[n])
            if (out.insert(m).second) queue.push_back(m);
    }
    out.erase(from);
    return out;
}

std::set<std::string> localized_revision(const WorkflowGraph& graph, const std::string& failed,
                                         const AssetFlow& consumed, const AssetFlow& produced) {
    if (!graph.nodes.count(failed)) throw NotFound("unknown task '" + failed + "'");

    std::set<std::string> rerun{failed};
    std::set<std::string> dirty_assets;
    auto mark = [&](const std::string& task) {
        if (auto it = produced.find(task); it != produced.end())
            dirty_assets.insert(it->second.begin(), it->second.end());
    };
    mark(failed);

    const auto candidates = descendants(graph, failed);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& d : candidates) {
            if (rerun.count(d)) continue;
            auto it = consumed.find(d);
            if (it == consumed.end()) continue;
            const bool hit = std::any_of(it->second.begin(), it->second.end(),
                                         [&](const std::string& a) { return dirty_assets.count(a) > 0; });
            if (hit) {
                rerun.insert(d);
                mark(d);
                changed = true;
            }
        }
    }
    return rerun;
}

} // namespace storyreel
