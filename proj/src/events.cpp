#include "storyreel/events.hpp"

#include "storyreel/errors.hpp"

#include <fstream>
#include <sstream>

namespace storyreel {

void to_json(json& j, const Event& v) { j = json{{"seq", v.seq}, {"kind", v.kind}, {"payload", v.payload}}; }

void from_json(const json& j, Event& v) {
    j.at("seq").get_to(v.seq);
    j.at("kind").get_to(v.kind);
    v.payload = j.value("payload", json::object());
}

EventLog::EventLog(std::vector<Event> events) : events_(std::move(events)), closed_(true) {}

std::uint64_t EventLog::append(std::string kind, json payload) {
    std::uint64_t seq;
    {
        std::lock_guard lock(mutex_);
        if (closed_) throw ContractViolation("event log is closed");
        seq = events_.size() + 1;
        events_.push_back(Event{seq, std::move(kind), std::move(payload)});
    }
    cv_.notify_all();
    return seq;
}

std::vector<Event> EventLog::snapshot() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::vector<Event> EventLog::since(std::uint64_t after) const {
    std::lock_guard lock(mutex_);
    if (after >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
}

std::size_t EventLog::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

bool EventLog::wait_for(std::uint64_t after, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return events_.size() > after || closed_; });
    return events_.size() > after;
}

void EventLog::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool EventLog::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::string EventLog::to_jsonl() const {
    std::string out;
    for (const auto& e : snapshot()) {
        out += json(e).dump();
        out += '\n';
    }
    return out;
}

void EventLog::write_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write transcript " + path.string());
    out << to_jsonl();
}

std::vector<Event> EventLog::parse_jsonl(std::string_view text) {
    std::vector<Event> events;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            events.push_back(json::parse(line).get<Event>());
        } catch (const json::exception& e) {
            throw ParseError("transcript line " + std::to_string(n) + ": " + e.what());
        }
    }
    return events;
}

std::vector<Event> EventLog::read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open transcript " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_jsonl(buf.str());
}

void to_json(json& j, const TaskView& v) {
    j = json{{"id", v.id},
             {"kind", v.kind},
             {"agent", v.agent},
             {"status", v.status},
             {"revision_count", v.revision_count},
             {"attempts", v.attempts},
             {"degraded", v.degraded}};
}

void to_json(json& j, const ReviewItem& v) {
    j = json{{"task_id", v.task_id},
             {"reason", v.reason},
             {"asset_refs", v.asset_refs},
             {"report", v.report ? json(*v.report) : json(nullptr)},
             {"options", {"approve", "reject_with_note", "override_tool"}},
             {"tools", v.tools}};
}

RunProjection replay(const std::vector<Event>& events) {
    RunProjection p;
    auto drop_review = [&](const std::string& task) {
        std::erase_if(p.reviews, [&](const ReviewItem& r) { return r.task_id == task; });
    };
    for (const auto& e : events) {
        const auto& d = e.payload;
        if (e.kind == "run_started") {
            p.run_id = d.value("run_id", std::string{});
        } else if (e.kind == "graph_planned") {
            p.graph = d.at("graph").get<WorkflowGraph>();
            for (const auto& t : d.at("tasks")) {
                TaskView v;
                v.id = t.at("id").get<std::string>();
                v.kind = t.at("kind").get<TaskKind>();
                v.agent = t.at("agent").get<std::string>();
                p.tasks[v.id] = v;
            }
        } else if (e.kind == "task_status") {
            auto& v = p.tasks.at(d.at("task_id").get<std::string>());
            const auto from = d.at("from").get<TaskStatus>();
            const auto to = d.at("to").get<TaskStatus>();
            if (v.status != from || !is_valid_transition(from, to))
                throw ContractViolation("transcript has illegal transition for " + v.id + " at seq " +
                                        std::to_string(e.seq));
            v.status = to;
            v.revision_count = d.value("revision_count", v.revision_count);
            if (to == TaskStatus::running) ++v.attempts;
            if (from == TaskStatus::awaiting_review) drop_review(v.id);
        } else if (e.kind == "review_requested") {
            ReviewItem r;
            r.task_id = d.at("task_id").get<std::string>();
            r.reason = d.value("reason", std::string{});
            r.asset_refs = d.value("asset_refs", std::vector<std::string>{});
            if (d.contains("report") && !d["report"].is_null()) r.report = d["report"].get<EvaluationReport>();
            r.tools = d.value("tools", std::vector<std::string>{});
            drop_review(r.task_id);
            p.reviews.push_back(std::move(r));
        } else if (e.kind == "asset_stored") {
            p.assets.push_back(d.at("record").get<AssetRecord>());
        } else if (e.kind == "task_degraded") {
            p.tasks.at(d.at("task_id").get<std::string>()).degraded = true;
        } else if (e.kind == "run_completed") {
            p.completed = true;
            p.manifest = d.at("manifest").get<FinalManifest>();
        } else if (e.kind == "run_failed") {
            p.failed = true;
            p.failure = d.value("reason", std::string{});
        }
    }
    return p;
}

json RunProjection::graph_json() const {
    json nodes = json::array(), edges = json::array();
    for (const auto& [id, v] : tasks) nodes.push_back(v);
    for (const auto& [a, b] : graph.edges) edges.push_back({{"from", a}, {"to", b}});
    std::string state = completed ? "completed" : failed ? "failed" : "running";
    return json{{"run_id", run_id}, {"state", state}, {"nodes", nodes}, {"edges", edges}};
}

json RunProjection::reviews_json() const {
    json out = json::array();
    for (const auto& r : reviews) out.push_back(r);
    return out;
}

json RunProjection::assets_json(std::optional<AssetTable> table) const {
    std::map<std::string, const AssetRecord*> latest;
    for (const auto& a : assets)
        if (a.branch == "main" && (!table || a.table == *table)) latest[a.key()] = &a;
    json out = json::array();
    for (const auto& [key, rec] : latest) out.push_back(*rec);
    return out;
}

} // namespace storyreel
