#pragma once

#include "storyreel/domain.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace storyreel {

struct ToolInvocation {
    std::string tool;
    json params = json::object();
    std::uint64_t seed = 0;
};

struct ToolOutput {
    json descriptor;
    std::string content_digest;
};

/// Backend behind a registered tool. Real generators can replace the mock by declaring a
/// command or HTTP adapter in the registry file; agents only see descriptors and digests.
class ToolAdapter {
public:
    virtual ~ToolAdapter() = default;
    virtual ToolOutput invoke(const ToolInvocation& invocation) const = 0;
};

/// Deterministic stand-in: the descriptor is the parameters plus tool name and seed, the
/// digest is SHA-256 of the descriptor's canonical JSON.
class MockAdapter final : public ToolAdapter {
public:
    ToolOutput invoke(const ToolInvocation& invocation) const override;
};

/// Runs a shell command with the invocation JSON on stdin and reads
/// {"descriptor": ..., "content_digest": ...} from stdout. A missing digest is computed.
class CommandAdapter final : public ToolAdapter {
public:
    explicit CommandAdapter(std::string command) : command_(std::move(command)) {}
    ToolOutput invoke(const ToolInvocation& invocation) const override;

private:
    std::string command_;
};

/// POSTs the invocation JSON to `url` and expects the same response shape as CommandAdapter.
class HttpAdapter final : public ToolAdapter {
public:
    explicit HttpAdapter(std::string url);
    ToolOutput invoke(const ToolInvocation& invocation) const override;

private:
    std::string base_;
    std::string path_;
};

std::unique_ptr<ToolAdapter> make_adapter(const AdapterSpec& spec);

std::string descriptor_digest(const json& descriptor);

/// Output of one tool call as seen by agents and the evaluator.
struct MockAsset {
    std::string asset_id;
    std::string kind; // image | video | audio | music
    json descriptor = json::object();
    std::string content_digest;
    bool operator==(const MockAsset&) const = default;

    /// True when the digest matches the descriptor (always, for mock-generated assets).
    bool digest_matches() const;
};

void to_json(json& j, const MockAsset& v);
void from_json(const json& j, MockAsset& v);

/// Which tool calls return drifted output. Used to exercise the revision loop: a targeted
/// task drifts on its first `attempts` executions; otherwise each (task, attempt) drifts
/// with probability `rate`, decided by the run seed.
struct FaultPlan {
    double rate = 0.0;
    std::map<std::string, int> targets;

    bool perturbs(std::string_view task_id, int attempt, std::uint64_t seed) const;
};

void to_json(json& j, const FaultPlan& v);
void from_json(const json& j, FaultPlan& v);

} // namespace storyreel
