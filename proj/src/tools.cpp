#include "storyreel/tools.hpp"

#include "storyreel/digest.hpp"
#include "storyreel/errors.hpp"

#include <httplib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>

namespace storyreel {

namespace {

ToolOutput parse_adapter_reply(const std::string& body, const std::string& source) {
    json reply;
    try {
        reply = json::parse(body);
    } catch (const json::parse_error& e) {
        throw AdapterError(source + " returned malformed JSON: " + e.what());
    }
    if (!reply.is_object() || !reply.contains("descriptor") || !reply["descriptor"].is_object())
        throw AdapterError(source + " reply lacks a descriptor object");
    ToolOutput out{reply["descriptor"], reply.value("content_digest", std::string{})};
    if (out.content_digest.empty()) out.content_digest = descriptor_digest(out.descriptor);
    return out;
}

json invocation_json(const ToolInvocation& inv) {
    return json{{"tool", inv.tool}, {"params", inv.params}, {"seed", inv.seed}};
}

} // namespace

std::string descriptor_digest(const json& descriptor) { return sha256_hex(descriptor.dump()); }

ToolOutput MockAdapter::invoke(const ToolInvocation& inv) const {
    json descriptor = inv.params.is_object() ? inv.params : json{{"params", inv.params}};
    descriptor["tool"] = inv.tool;
    descriptor["seed"] = inv.seed;
    return {descriptor, descriptor_digest(descriptor)};
}

ToolOutput CommandAdapter::invoke(const ToolInvocation& inv) const {
    const auto dir = std::filesystem::temp_directory_path();
    const auto input = dir / ("storyreel_tool_" + std::to_string(::getpid()) + "_" +
                              std::to_string(mix_seed(inv.seed, inv.tool)) + ".json");
    {
        std::ofstream out(input);
        out << invocation_json(inv).dump();
    }
    const std::string cmd = command_ + " < '" + input.string() + "'";
    std::string body;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        std::filesystem::remove(input);
        throw AdapterError("cannot start tool command: " + command_);
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) body.append(buf, n);
    const int status = ::pclose(pipe);
    std::filesystem::remove(input);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw AdapterError("tool command failed: " + command_);
    return parse_adapter_reply(body, "tool command '" + command_ + "'");
}

HttpAdapter::HttpAdapter(std::string url) {
    // split "http://host:port/path" into client base and request path
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    base_ = path_start == std::string::npos ? url : url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

ToolOutput HttpAdapter::invoke(const ToolInvocation& inv) const {
    httplib::Client client(base_);
    client.set_connection_timeout(5);
    client.set_read_timeout(60);
    auto res = client.Post(path_, invocation_json(inv).dump(), "application/json");
    if (!res) throw AdapterError("tool endpoint " + base_ + path_ + " unreachable");
    if (res->status != 200)
        throw AdapterError("tool endpoint " + base_ + path_ + " answered " + std::to_string(res->status));
    return parse_adapter_reply(res->body, "tool endpoint " + base_ + path_);
}

std::unique_ptr<ToolAdapter> make_adapter(const AdapterSpec& spec) {
    if (spec.kind == "mock") return std::make_unique<MockAdapter>();
    if (spec.kind == "command") {
        if (spec.target.empty()) throw ConfigError("command adapter needs a target command");
        return std::make_unique<CommandAdapter>(spec.target);
    }
    if (spec.kind == "http") {
        if (spec.target.empty()) throw ConfigError("http adapter needs a target URL");
        return std::make_unique<HttpAdapter>(spec.target);
    }
    throw ConfigError("unknown adapter kind '" + spec.kind + "'");
}

bool MockAsset::digest_matches() const { return descriptor_digest(descriptor) == content_digest; }

void to_json(json& j, const MockAsset& v) {
    j = json{{"asset_id", v.asset_id},
             {"kind", v.kind},
             {"descriptor", v.descriptor},
             {"content_digest", v.content_digest}};
}

void from_json(const json& j, MockAsset& v) {
    j.at("asset_id").get_to(v.asset_id);
    j.at("kind").get_to(v.kind);
    v.descriptor = j.at("descriptor");
    j.at("content_digest").get_to(v.content_digest);
}

bool FaultPlan::perturbs(std::string_view task_id, int attempt, std::uint64_t seed) const {
    if (auto it = targets.find(std::string(task_id)); it != targets.end()) return attempt <= it->second;
    if (rate <= 0.0) return false;
    std::mt19937_64 rng(mix_seed(seed, std::string(task_id) + "#fault#" + std::to_string(attempt)));
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < rate;
}

void to_json(json& j, const FaultPlan& v) {
    json targets = json::array();
    for (const auto& [task, attempts] : v.targets) targets.push_back({{"task", task}, {"attempts", attempts}});
    j = json{{"rate", v.rate}, {"targets", targets}};
}

void from_json(const json& j, FaultPlan& v) {
    v.rate = j.value("rate", 0.0);
    v.targets.clear();
    for (const auto& t : j.value("targets", json::array()))
        v.targets[t.at("task").get<std::string>()] = t.value("attempts", 1);
}

} // namespace storyreel
