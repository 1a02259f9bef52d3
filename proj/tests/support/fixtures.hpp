#pragma once

#include "storyreel/config.hpp"
#include "storyreel/domain.hpp"
#include "storyreel/segmenter.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace storyreel;

/// The training-room shot used throughout the worked examples.
std::string yx01_text();
Lexicon yx01_lexicon();

/// Two scenes: a two-character exchange with dialogue and a quiet establishing scene.
std::string sample_script();
Lexicon sample_lexicon();

struct GeneratedScript {
    std::string text;
    Lexicon lexicon;
    std::size_t expected_scenes = 0;
    std::vector<std::size_t> expected_shots; // per scene
};

struct ScriptLimits {
    std::size_t max_scenes = 5;
    std::size_t max_shots = 4;
    std::size_t max_characters = 3;
};

/// Random script from a small phrase bank: each scene is a paragraph, each shot one
/// sentence or one dialogue line.
GeneratedScript random_script(std::mt19937_64& rng, const ScriptLimits& limits = {});

/// Base config with no faults and the fixture lexicon.
RunConfig base_config(const Lexicon& lexicon, std::uint64_t seed = 1);

std::string read_text(const std::filesystem::path& path);
std::filesystem::path source_dir();

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

} // namespace fixtures
