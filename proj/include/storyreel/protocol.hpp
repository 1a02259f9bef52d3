#pragma once

#include "storyreel/domain.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace storyreel {

enum class MessageStatus { success, error };

std::string_view to_string(MessageStatus s) noexcept;

struct TaskSpec {
    std::string prompt;
    std::optional<std::string> requirement;
    json extra = json::object(); // any further task fields, e.g. "params"
    bool operator==(const TaskSpec&) const = default;
};

struct MessageMeta {
    int version = 1;
    std::string producer;
    json extra = json::object();
    bool operator==(const MessageMeta&) const = default;
};

using AssetRefs = std::map<std::string, std::vector<std::string>>;

/// Inter-agent message. A request carries `task`, a response carries `status`; never both.
struct Envelope {
    std::string id;
    std::string type;
    std::optional<TaskSpec> task;
    std::optional<MessageStatus> status;
    std::optional<json> outputs;
    std::optional<AssetRefs> assets;
    MessageMeta meta;
    json extensions = json::object(); // unknown top-level fields, kept for forward compatibility
    bool operator==(const Envelope&) const = default;

    bool is_request() const noexcept { return task.has_value(); }
    /// task.extra["params"], or an empty object.
    const json& params() const;
    const std::vector<std::string>& asset_refs(const std::string& role) const;
};

Envelope make_request(std::string id, std::string type, std::string prompt, std::optional<std::string> requirement,
                      json params, AssetRefs assets, int version, std::string producer);
Envelope make_response(const Envelope& request, MessageStatus status, json outputs);

/// Throws ValidationFailed naming the offending field path.
void validate(const Envelope& envelope);

json to_json_value(const Envelope& envelope);

/// Canonical text: sorted keys, UTF-8, no insignificant whitespace.
std::string encode(const Envelope& envelope);

/// Throws ParseError for malformed text and ValidationFailed for structural problems.
Envelope decode(std::string_view text);
Envelope decode_value(const json& value);

struct ProvenanceEntry {
    std::string id;
    int version = 0;
    std::string producer;
    std::uint64_t seq = 0;
    bool operator==(const ProvenanceEntry&) const = default;
};

/// Append-only record of who produced each (message id, version).
class ProvenanceChain {
public:
    /// Throws ProvenanceConflict when (id, version) was already claimed by another producer.
    ProvenanceEntry track(const Envelope& envelope);

    std::vector<ProvenanceEntry> entries() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<ProvenanceEntry> entries_;
    std::map<std::pair<std::string, int>, std::string> owners_;
};

} // namespace storyreel
