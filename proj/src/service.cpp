#include "storyreel/service.hpp"

#include "storyreel/errors.hpp"

#include <httplib.h>

#include <cstdlib>

namespace storyreel {

void RunStore::add(const std::string& run_id, RunHandle handle) {
    std::lock_guard lock(mutex_);
    runs_[run_id] = std::move(handle);
}

std::optional<RunHandle> RunStore::find(const std::string& run_id) const {
    std::lock_guard lock(mutex_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> RunStore::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, h] : runs_) out.push_back(id);
    return out;
}

std::size_t RunStore::load_transcripts(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw NotFound("no transcript directory " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::size_t loaded = 0;
    for (const auto& f : files) {
        auto events = EventLog::read_jsonl(f);
        if (events.empty() || events.front().kind != "run_started") continue;
        const auto id = events.front().payload.value("run_id", std::string{});
        if (id.empty()) continue;
        add(id, RunHandle{std::make_shared<EventLog>(std::move(events)), nullptr});
        ++loaded;
    }
    return loaded;
}

std::pair<std::string, int> parse_listen_address(std::string_view address) {
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == address.size())
        throw ConfigError("listen address must look like host:port, got '" + std::string(address) + "'");
    const auto port_text = std::string(address.substr(colon + 1));
    int port = 0;
    for (char c : port_text) {
        if (c < '0' || c > '9') throw ConfigError("bad port in listen address '" + std::string(address) + "'");
        port = port * 10 + (c - '0');
        if (port > 65535) throw ConfigError("port out of range in '" + std::string(address) + "'");
    }
    return {std::string(address.substr(0, colon)), port};
}

std::string listen_address_from_env() {
    const char* v = std::getenv(kListenEnv);
    return v && *v ? std::string(v) : std::string(kDefaultListen);
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void error_reply(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, json{{"error", message}});
}

bool terminal(const Event& e) { return e.kind == "run_completed" || e.kind == "run_failed"; }

} // namespace

Service::Service(std::shared_ptr<RunStore> runs) : runs_(std::move(runs)), server_(std::make_unique<httplib::Server>()) {
    routes();
}

Service::~Service() { stop(); }

void Service::routes() {
    auto& s = *server_;
    auto runs = runs_;

    s.Get("/runs", [runs](const httplib::Request&, httplib::Response& res) { reply(res, 200, runs->ids()); });

    s.Get(R"(/runs/([^/]+)/graph)", [runs](const httplib::Request& req, httplib::Response& res) {
        auto run = runs->find(req.matches[1]);
        if (!run) return error_reply(res, 404, "unknown run");
        reply(res, 200, replay(run->log->snapshot()).graph_json());
    });

    s.Get(R"(/runs/([^/]+)/assets)", [runs](const httplib::Request& req, httplib::Response& res) {
        auto run = runs->find(req.matches[1]);
        if (!run) return error_reply(res, 404, "unknown run");
        std::optional<AssetTable> table;
        if (req.has_param("table")) {
            table = parse_table(req.get_param_value("table"));
            if (!table) return error_reply(res, 400, "unknown table " + req.get_param_value("table"));
        }
        reply(res, 200, replay(run->log->snapshot()).assets_json(table));
    });

    s.Get(R"(/runs/([^/]+)/reviews)", [runs](const httplib::Request& req, httplib::Response& res) {
        auto run = runs->find(req.matches[1]);
        if (!run) return error_reply(res, 404, "unknown run");
        reply(res, 200, replay(run->log->snapshot()).reviews_json());
    });

    s.Post(R"(/runs/([^/]+)/tasks/([^/]+)/decision)", [runs](const httplib::Request& req, httplib::Response& res) {
        auto run = runs->find(req.matches[1]);
        if (!run) return error_reply(res, 404, "unknown run");
        const std::string task = req.matches[2];
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            return error_reply(res, 400, "body is not JSON");
        }
        if (!body.is_object() || !body.contains("decision") || !body["decision"].is_string())
            return error_reply(res, 400, "body needs a decision");
        const auto kind = body["decision"].get<std::string>();
        ReviewDecision d;
        if (kind == "approve") {
            d.kind = ReviewDecision::Kind::approve;
        } else if (kind == "reject" || kind == "reject_with_note") {
            d.kind = ReviewDecision::Kind::reject;
            d.note = body.value("note", std::string{});
        } else if (kind == "override_tool") {
            d.kind = ReviewDecision::Kind::override_tool;
            d.tool = body.value("tool", body.value("name", std::string{}));
            if (d.tool.empty()) return error_reply(res, 400, "override_tool needs a tool name");
        } else {
            return error_reply(res, 400, "unknown decision " + kind);
        }
        const auto projection = replay(run->log->snapshot());
        if (!projection.tasks.count(task)) return error_reply(res, 404, "unknown task");
        if (!run->director) return error_reply(res, 409, "run is read-only");
        const auto result = run->director->submit_decision(task, d);
        switch (result.code) {
        case DecisionResult::Code::applied:
            return reply(res, 202, json{{"task_id", task}, {"decision", kind}, {"status", "accepted"}});
        case DecisionResult::Code::not_found: return error_reply(res, 404, result.message);
        case DecisionResult::Code::conflict: return error_reply(res, 409, result.message);
        case DecisionResult::Code::invalid: return error_reply(res, 400, result.message);
        }
    });

    s.Get(R"(/runs/([^/]+)/events)", [runs](const httplib::Request& req, httplib::Response& res) {
        auto run = runs->find(req.matches[1]);
        if (!run) return error_reply(res, 404, "unknown run");
        auto log = run->log;
        auto cursor = std::make_shared<std::uint64_t>(0);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [log, cursor](std::size_t, httplib::DataSink& sink) {
            auto events = log->since(*cursor);
            if (events.empty()) {
                if (log->closed()) {
                    sink.done();
                    return true;
                }
                log->wait_for(*cursor, std::chrono::milliseconds(200));
                return true;
            }
            for (const auto& e : events) {
                const auto frame = "id: " + std::to_string(e.seq) + "\nevent: " + e.kind +
                                   "\ndata: " + json(e).dump() + "\n\n";
                if (!sink.write(frame.data(), frame.size())) return false;
                *cursor = e.seq;
                if (terminal(e)) {
                    sink.done();
                    return true;
                }
            }
            return true;
        });
    });
}

int Service::start(const std::string& host, int port) {
    int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

void Service::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace storyreel
