#pragma once

#include "storyreel/agents.hpp"
#include "storyreel/segmenter.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

namespace storyreel {

struct RunConfig {
    int max_revisions = 3;
    bool continue_on_degraded = true;
    EvaluationThresholds thresholds;
    Lexicon characters;
    StyleRules style_rules;
    std::string registry_path; // empty: built-in registry
    std::uint64_t seed = 0;
    bool interactive = false;
    std::set<TaskKind> review_checkpoints;
    double seconds_per_panel = 2.0;
    FaultPlan faults;
    unsigned workers = 1;
    std::string run_id; // empty: derived from story text and seed
};

/// Throws ConfigError on malformed or out-of-range values.
RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& config);

/// Reads a JSON config file. A relative registry_path is resolved against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// The registry named by the config, or the built-in one.
ToolRegistry registry_for(const RunConfig& config);

} // namespace storyreel
