#pragma once

#include "storyreel/domain.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace storyreel {

/// One transcript line. `seq` is the logical timestamp: 1, 2, 3... in append order.
struct Event {
    std::uint64_t seq = 0;
    std::string kind;
    json payload = json::object();
    bool operator==(const Event&) const = default;
};

void to_json(json& j, const Event& v);
void from_json(const json& j, Event& v);

/// Append-only, thread-safe run transcript. Readers can block until new events arrive.
class EventLog {
public:
    EventLog() = default;
    explicit EventLog(std::vector<Event> events); // closed, read-only replay of a transcript

    std::uint64_t append(std::string kind, json payload);
    std::vector<Event> snapshot() const;
    /// Events with seq > after.
    std::vector<Event> since(std::uint64_t after) const;
    std::size_t size() const;

    /// Blocks until an event with seq > after exists, the log is closed, or the timeout
    /// passes. Returns true when new events are available.
    bool wait_for(std::uint64_t after, std::chrono::milliseconds timeout) const;

    void close();
    bool closed() const;

    /// One JSON object per line, keys sorted.
    std::string to_jsonl() const;
    void write_jsonl(const std::filesystem::path& path) const;
    static std::vector<Event> read_jsonl(const std::filesystem::path& path);
    static std::vector<Event> parse_jsonl(std::string_view text);

private:
    mutable std::mutex mutex_;
    mutable std::condition_variable cv_;
    std::vector<Event> events_;
    bool closed_ = false;
};

struct TaskView {
    std::string id;
    TaskKind kind = TaskKind::storyboard;
    std::string agent;
    TaskStatus status = TaskStatus::pending;
    int revision_count = 0;
    int attempts = 0;
    bool degraded = false;
};

struct ReviewItem {
    std::string task_id;
    std::string reason;
    std::vector<std::string> asset_refs;
    std::optional<EvaluationReport> report;
    std::vector<std::string> tools; // candidates for an override decision
};

/// State of a run rebuilt purely from its events.
struct RunProjection {
    std::string run_id;
    WorkflowGraph graph;
    std::map<std::string, TaskView> tasks;
    std::vector<ReviewItem> reviews; // currently awaiting a decision, by request order
    std::vector<AssetRecord> assets; // every stored version, in store order
    std::optional<FinalManifest> manifest;
    bool completed = false;
    bool failed = false;
    std::string failure;

    json graph_json() const;
    json reviews_json() const;
    /// Latest main-branch version per asset, optionally restricted to one table.
    json assets_json(std::optional<AssetTable> table = std::nullopt) const;
};

/// Throws ContractViolation when the events describe an illegal status transition.
RunProjection replay(const std::vector<Event>& events);

void to_json(json& j, const TaskView& v);
void to_json(json& j, const ReviewItem& v);

} // namespace storyreel
