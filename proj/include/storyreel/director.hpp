#pragma once

#include "storyreel/agents.hpp"
#include "storyreel/asset_memory.hpp"
#include "storyreel/config.hpp"
#include "storyreel/events.hpp"
#include "storyreel/planner.hpp"
#include "storyreel/protocol.hpp"
#include "storyreel/registry.hpp"

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

namespace storyreel {

enum class EvaluationDecision { accept, revise, degrade_and_continue, fail };

std::string_view to_string(EvaluationDecision d) noexcept;

/// Routing of one evaluation. Throws ContractViolation when the report is for another task.
EvaluationDecision handle_evaluation(const Task& task, const EvaluationReport& report, const RunConfig& config);

struct ReviewDecision {
    enum class Kind { approve, reject, override_tool };
    Kind kind = Kind::approve;
    std::string note;
    std::string tool;
};

struct DecisionResult {
    enum class Code { applied, not_found, conflict, invalid };
    Code code = Code::applied;
    std::string message;
};

/// Plans a story into tasks, dispatches each ready task to its agent, routes evaluations
/// into accept / localized revision / degrade / fail, and assembles the final manifest.
///
/// Every state change is appended to the event log first; the log alone is enough to
/// rebuild task statuses and review queues. All timestamps are logical.
class Director {
public:
    Director(RunConfig config, std::shared_ptr<const ToolRegistry> registry, AgentSet agents = default_agents(),
             std::shared_ptr<EventLog> log = std::make_shared<EventLog>(),
             std::shared_ptr<AssetMemory> memory = std::make_shared<AssetMemory>());

    /// Runs to completion. Throws PlanningError / ConfigError before any task starts and
    /// RunFailure when a task fails or exhausts its revisions without degradation. The
    /// event log is closed on return either way.
    FinalManifest run(const Story& story);

    /// Human decision on a task awaiting review. Safe to call from any thread while run()
    /// is blocked waiting for reviews.
    DecisionResult submit_decision(const std::string& task_id, const ReviewDecision& decision);

    const std::shared_ptr<EventLog>& events() const noexcept { return log_; }
    const std::shared_ptr<AssetMemory>& memory() const noexcept { return memory_; }
    const RunConfig& config() const noexcept { return config_; }
    /// Run id; known once run() has started.
    std::string run_id() const;

    std::map<std::string, Task> tasks() const;
    /// Asset keys read or declared per task, plus "output:<task>" markers linking each
    /// evaluation to its target's response.
    AssetFlow consumed() const;
    AssetFlow produced() const;
    const WorkflowGraph& graph() const noexcept { return graph_; }

private:
    struct Result {
        std::string task_id;
        Envelope request;
        std::optional<AgentOutput> output;
        std::set<std::string> reads;
        std::string error;
    };

    void set_status(Task& task, TaskStatus to, const std::string& cause, const json& extra = json::object());
    Envelope build_request(const Task& task);
    Result execute(Task task, Envelope request) const;
    void apply_result(const Result& result, std::vector<std::pair<std::string, EvaluationReport>>& evaluations);
    void apply_decisions();
    void process_evaluation(const std::string& eval_id, const EvaluationReport& report);
    void revise(const std::string& task_id, const std::string& cause, std::optional<std::string> tool,
                std::optional<std::string> note);
    void request_review(const Task& task, const std::string& reason, const std::optional<EvaluationReport>& report);
    [[noreturn]] void fail_run(const std::string& task_id, const std::string& reason);
    std::vector<std::string> ready_tasks() const;
    std::vector<std::string> predecessors_of(const std::string& id) const;

    RunConfig config_;
    std::shared_ptr<const ToolRegistry> registry_;
    AgentSet agents_;
    std::shared_ptr<EventLog> log_;
    std::shared_ptr<AssetMemory> memory_;
    ProvenanceChain provenance_;

    mutable std::mutex mutex_;
    std::condition_variable decided_;
    std::string run_id_;
    WorkflowGraph graph_;
    std::map<std::string, std::vector<std::string>> preds_;
    std::map<std::string, Task> tasks_;
    std::map<std::string, int> attempts_;
    AssetFlow consumed_;
    AssetFlow produced_;
    std::map<std::string, json> outputs_;
    std::map<std::string, std::string> overrides_;
    std::map<std::string, std::string> notes_;
    std::set<std::string> degraded_;
    std::map<std::string, ReviewDecision> queued_;
    bool running_ = false;
};

/// Segmented story in, manifest out, with a fresh in-memory asset store.
FinalManifest run_pipeline(const Story& story, const RunConfig& config,
                           std::shared_ptr<EventLog> log = std::make_shared<EventLog>());

/// "run_" + first 12 hex digits of SHA-256 over story text and seed.
std::string derive_run_id(const Story& story, std::uint64_t seed);

} // namespace storyreel
