#pragma once

#include "storyreel/domain.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace storyreel {

struct Plan {
    std::vector<Task> tasks; // planning order
    WorkflowGraph graph;
};

namespace task_ids {
std::string character_design(std::string_view character_id);
std::string scene_design(std::string_view scene_id);
std::string storyboard(std::string_view shot_id);
std::string animation(std::string_view shot_id);
std::string audio(std::string_view shot_id);
std::string edit();
std::string evaluate(std::string_view target);
} // namespace task_ids

/// Expands a segmented story into production tasks and their dependency graph.
/// Throws PlanningError for a story without scenes.
Plan plan_tasks(const Story& story, const StyleVector& styles);

using Batch = std::vector<std::string>;

/// Kahn layering: each batch holds every task whose predecessors sit in earlier batches,
/// sorted lexicographically. Throws CycleError naming the nodes of one cycle.
std::vector<Batch> topological_schedule(const WorkflowGraph& graph);

/// Every node reachable from `from` (excluding `from`).
std::set<std::string> descendants(const WorkflowGraph& graph, const std::string& from);

using AssetFlow = std::map<std::string, std::set<std::string>>; // task id -> asset keys

/// Tasks to re-run after `failed` is revised: the task itself plus each descendant that
/// read an asset written by a task already in the re-run set. Ancestors are never included.
std::set<std::string> localized_revision(const WorkflowGraph& graph, const std::string& failed,
                                         const AssetFlow& consumed, const AssetFlow& produced);

} // namespace storyreel
