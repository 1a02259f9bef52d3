#pragma once

#include "storyreel/director.hpp"
#include "storyreel/events.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

namespace storyreel {

inline constexpr char kListenEnv[] = "STORYREEL_LISTEN";
inline constexpr char kDefaultListen[] = "127.0.0.1:8080";

/// A run visible to the service: its event log and, while it is live, the director that
/// accepts decisions. Transcript-only runs have no director and reject decisions.
struct RunHandle {
    std::shared_ptr<EventLog> log;
    std::shared_ptr<Director> director;
};

class RunStore {
public:
    void add(const std::string& run_id, RunHandle handle);
    std::optional<RunHandle> find(const std::string& run_id) const;
    std::vector<std::string> ids() const;

    /// Registers every *.jsonl transcript under `dir` (recursively) by the run id in its
    /// run_started event. Returns the number of runs loaded.
    std::size_t load_transcripts(const std::filesystem::path& dir);

private:
    mutable std::mutex mutex_;
    std::map<std::string, RunHandle> runs_;
};

/// "host:port" -> (host, port). Throws ConfigError.
std::pair<std::string, int> parse_listen_address(std::string_view address);
/// STORYREEL_LISTEN, or 127.0.0.1:8080.
std::string listen_address_from_env();

/// Read-only HTTP projection of run transcripts plus the decision endpoint.
class Service {
public:
    explicit Service(std::shared_ptr<RunStore> runs);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port; returns the port.
    int start(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    bool listen(const std::string& host, int port);
    void stop();

private:
    void routes();

    std::shared_ptr<RunStore> runs_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace storyreel
