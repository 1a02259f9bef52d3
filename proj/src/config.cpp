#include "storyreel/config.hpp"

#include "storyreel/errors.hpp"

#include <fstream>

namespace storyreel {

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
        c.max_revisions = j.value("max_revisions", c.max_revisions);
        c.continue_on_degraded = j.value("continue_on_degraded", c.continue_on_degraded);
        if (auto t = j.find("thresholds"); t != j.end())
            c.thresholds.text_similarity = t->value("text_similarity", c.thresholds.text_similarity);
        if (auto it = j.find("characters"); it != j.end()) it->get_to(c.characters);
        if (auto it = j.find("style_rules"); it != j.end()) it->get_to(c.style_rules);
        c.registry_path = j.value("registry_path", std::string{});
        c.seed = j.value("seed", std::uint64_t{0});
        c.interactive = j.value("interactive", false);
        for (const auto& k : j.value("review_checkpoints", json::array())) {
            auto kind = parse_task_kind(k.get<std::string>());
            if (!kind) throw ConfigError("unknown review checkpoint '" + k.get<std::string>() + "'");
            c.review_checkpoints.insert(*kind);
        }
        c.seconds_per_panel = j.value("seconds_per_panel", c.seconds_per_panel);
        if (auto it = j.find("faults"); it != j.end()) it->get_to(c.faults);
        c.workers = j.value("workers", 1u);
        c.run_id = j.value("run_id", std::string{});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    if (c.max_revisions < 0) throw ConfigError("max_revisions must be >= 0");
    if (c.thresholds.text_similarity < 0.0 || c.thresholds.text_similarity > 1.0)
        throw ConfigError("thresholds.text_similarity must lie in [0, 1]");
    if (c.seconds_per_panel <= 0.0) throw ConfigError("seconds_per_panel must be positive");
    if (c.workers == 0) throw ConfigError("workers must be >= 1");
    return c;
}

json config_to_json(const RunConfig& c) {
    json checkpoints = json::array();
    for (auto k : c.review_checkpoints) checkpoints.push_back(k);
    return json{{"max_revisions", c.max_revisions},
                {"continue_on_degraded", c.continue_on_degraded},
                {"thresholds", {{"text_similarity", c.thresholds.text_similarity}}},
                {"characters", c.characters},
                {"style_rules", c.style_rules},
                {"registry_path", c.registry_path},
                {"seed", c.seed},
                {"interactive", c.interactive},
                {"review_checkpoints", checkpoints},
                {"seconds_per_panel", c.seconds_per_panel},
                {"faults", c.faults},
                {"workers", c.workers},
                {"run_id", c.run_id}};
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    auto c = config_from_json(j);
    if (!c.registry_path.empty() && std::filesystem::path(c.registry_path).is_relative())
        c.registry_path = (path.parent_path() / c.registry_path).lexically_normal().string();
    return c;
}

ToolRegistry registry_for(const RunConfig& config) {
    if (config.registry_path.empty()) return default_registry();
    return ToolRegistry::load(config.registry_path);
}

} // namespace storyreel
