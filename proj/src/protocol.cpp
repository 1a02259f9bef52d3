#include "storyreel/protocol.hpp"

#include "storyreel/errors.hpp"

#include <cmath>
#include <set>

namespace storyreel {

namespace {

void require_finite(const json& j, const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw ValidationFailed(path, "number is not finite");
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) require_finite(it.value(), path + "." + it.key());
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], path + "[" + std::to_string(i) + "]");
    }
}

std::string required_string(const json& obj, const char* key, const std::string& path, bool non_empty) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationFailed(path, "missing");
    if (!it->is_string()) throw ValidationFailed(path, "must be a string");
    auto s = it->get<std::string>();
    if (non_empty && s.empty()) throw ValidationFailed(path, "must not be empty");
    return s;
}

} // namespace

std::string_view to_string(MessageStatus s) noexcept { return s == MessageStatus::success ? "success" : "error"; }

const json& Envelope::params() const {
    static const json empty = json::object();
    if (!task) return empty;
    auto it = task->extra.find("params");
    return it == task->extra.end() ? empty : *it;
}

const std::vector<std::string>& Envelope::asset_refs(const std::string& role) const {
    static const std::vector<std::string> none;
    if (!assets) return none;
    auto it = assets->find(role);
    return it == assets->end() ? none : it->second;
}

Envelope make_request(std::string id, std::string type, std::string prompt, std::optional<std::string> requirement,
                      json params, AssetRefs assets, int version, std::string producer) {
    Envelope e;
    e.id = std::move(id);
    e.type = std::move(type);
    TaskSpec task{std::move(prompt), std::move(requirement), json::object()};
    if (!params.is_null() && !(params.is_object() && params.empty())) task.extra["params"] = std::move(params);
    e.task = std::move(task);
    e.assets = std::move(assets);
    e.meta.version = version;
    e.meta.producer = std::move(producer);
    return e;
}

Envelope make_response(const Envelope& request, MessageStatus status, json outputs) {
    Envelope e;
    e.id = request.id;
    e.type = request.type;
    e.status = status;
    e.outputs = std::move(outputs);
    e.meta.version = request.meta.version;
    e.meta.producer = request.meta.producer;
    return e;
}

void validate(const Envelope& e) {
    if (e.id.empty()) throw ValidationFailed("id", "must not be empty");
    if (e.task && e.status) throw ValidationFailed("task", "a message carries either task or status, not both");
    if (!e.task && !e.status) throw ValidationFailed("task", "a message needs task (request) or status (response)");
    if (e.meta.version < 1) throw ValidationFailed("meta.version", "must be >= 1");
    if (e.meta.producer.empty()) throw ValidationFailed("meta.producer", "must not be empty");
    if (e.task && (!e.task->extra.is_object() || e.task->extra.contains("prompt") ||
                   e.task->extra.contains("requirement")))
        throw ValidationFailed("task", "extra fields must not shadow prompt or requirement");
    if (!e.meta.extra.is_object() || e.meta.extra.contains("version") || e.meta.extra.contains("producer"))
        throw ValidationFailed("meta", "extra fields must not shadow version or producer");
    if (!e.extensions.is_object()) throw ValidationFailed("$", "extensions must be an object");
    for (const char* reserved : {"id", "type", "task", "status", "outputs", "assets", "meta"})
        if (e.extensions.contains(reserved)) throw ValidationFailed(reserved, "shadowed by an extension field");
    if (e.outputs) require_finite(*e.outputs, "outputs");
    require_finite(e.extensions, "$");
}

json to_json_value(const Envelope& e) {
    json j = e.extensions;
    j["id"] = e.id;
    j["type"] = e.type;
    if (e.task) {
        json t = e.task->extra;
        t["prompt"] = e.task->prompt;
        if (e.task->requirement) t["requirement"] = *e.task->requirement;
        j["task"] = std::move(t);
    }
    if (e.status) j["status"] = std::string(to_string(*e.status));
    if (e.outputs) j["outputs"] = *e.outputs;
    if (e.assets) j["assets"] = *e.assets;
    json m = e.meta.extra;
    m["version"] = e.meta.version;
    m["producer"] = e.meta.producer;
    j["meta"] = std::move(m);
    return j;
}

std::string encode(const Envelope& e) {
    validate(e);
    try {
        return to_json_value(e).dump(-1, ' ', false, json::error_handler_t::strict);
    } catch (const json::type_error& err) {
        throw ValidationFailed("$", std::string("not encodable as UTF-8 JSON: ") + err.what());
    }
}

Envelope decode_value(const json& j) {
    if (!j.is_object()) throw ValidationFailed("$", "envelope must be a JSON object");
    Envelope e;
    e.id = required_string(j, "id", "id", true);
    e.type = required_string(j, "type", "type", false);

    const bool has_task = j.contains("task");
    const bool has_status = j.contains("status");
    if (has_task && has_status) throw ValidationFailed("task", "a message carries either task or status, not both");
    if (!has_task && !has_status)
        throw ValidationFailed("task", "a message needs task (request) or status (response)");

    if (has_task) {
        const auto& t = j.at("task");
        if (!t.is_object()) throw ValidationFailed("task", "must be an object");
        TaskSpec spec;
        spec.prompt = required_string(t, "prompt", "task.prompt", false);
        if (auto it = t.find("requirement"); it != t.end()) {
            if (!it->is_string()) throw ValidationFailed("task.requirement", "must be a string");
            spec.requirement = it->get<std::string>();
        }
        for (auto it = t.begin(); it != t.end(); ++it)
            if (it.key() != "prompt" && it.key() != "requirement") spec.extra[it.key()] = it.value();
        require_finite(spec.extra, "task");
        e.task = std::move(spec);
    } else {
        const auto& s = j.at("status");
        if (!s.is_string()) throw ValidationFailed("status", "must be a string");
        const auto v = s.get<std::string>();
        if (v == "success") e.status = MessageStatus::success;
        else if (v == "error") e.status = MessageStatus::error;
        else throw ValidationFailed("status", "must be 'success' or 'error'");
    }

    if (auto it = j.find("outputs"); it != j.end()) e.outputs = *it;

    if (auto it = j.find("assets"); it != j.end()) {
        if (!it->is_object()) throw ValidationFailed("assets", "must be an object");
        AssetRefs refs;
        for (auto a = it->begin(); a != it->end(); ++a) {
            const auto path = "assets." + a.key();
            if (!a.value().is_array()) throw ValidationFailed(path, "must be a list of references");
            auto& list = refs[a.key()];
            for (std::size_t i = 0; i < a.value().size(); ++i) {
                if (!a.value()[i].is_string())
                    throw ValidationFailed(path + "[" + std::to_string(i) + "]", "must be a string");
                list.push_back(a.value()[i].get<std::string>());
            }
        }
        e.assets = std::move(refs);
    }

    auto meta = j.find("meta");
    if (meta == j.end()) throw ValidationFailed("meta", "missing");
    if (!meta->is_object()) throw ValidationFailed("meta", "must be an object");
    auto version = meta->find("version");
    if (version == meta->end()) throw ValidationFailed("meta.version", "missing");
    if (!version->is_number_integer()) throw ValidationFailed("meta.version", "must be an integer");
    if (version->is_number_unsigned() ? version->get<std::uint64_t>() > 0x7fffffffULL
                                      : (version->get<std::int64_t>() < 1 || version->get<std::int64_t>() > 0x7fffffff))
        throw ValidationFailed("meta.version", "must be >= 1");
    e.meta.version = version->get<int>();
    if (e.meta.version < 1) throw ValidationFailed("meta.version", "must be >= 1");
    e.meta.producer = required_string(*meta, "producer", "meta.producer", true);
    for (auto it = meta->begin(); it != meta->end(); ++it)
        if (it.key() != "version" && it.key() != "producer") e.meta.extra[it.key()] = it.value();

    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::set<std::string> known{"id", "type", "task", "status", "outputs", "assets", "meta"};
        if (!known.count(it.key())) e.extensions[it.key()] = it.value();
    }
    validate(e);
    return e;
}

Envelope decode(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("malformed message: ") + err.what());
    }
    return decode_value(j);
}

ProvenanceEntry ProvenanceChain::track(const Envelope& e) {
    validate(e);
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(e.id, e.meta.version);
    if (auto it = owners_.find(key); it != owners_.end() && it->second != e.meta.producer)
        throw ProvenanceConflict("message " + e.id + " v" + std::to_string(e.meta.version) + " already produced by " +
                                 it->second + ", not " + e.meta.producer);
    owners_.emplace(key, e.meta.producer);
    entries_.push_back({e.id, e.meta.version, e.meta.producer, entries_.size() + 1});
    return entries_.back();
}

std::vector<ProvenanceEntry> ProvenanceChain::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t ProvenanceChain::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

} // namespace storyreel
