#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fixtures {

std::string yx01_text() {
    return "In Ye’s training room, Ye raises a blue-and-white porcelain cup with both hands, tilting his head "
           "to bring it to his mouth, while the system AI angrily try to stop him, telling him to stop.";
}

Lexicon yx01_lexicon() {
    return {{"Ye", "young man, blue robe"}, {"System AI", "glowing holographic assistant"}};
}

std::string sample_script() {
    return "In the training hall, Mira lifts a wooden sword, testing its weight, while Tomas angrily waves her off.\n"
           "Tomas: Put that down!\n"
           "Mira: Not before I finish.\n"
           "\n"
           "Snow settles over the empty courtyard.\n"
           "Mira stands beside the gate and watches the road.\n";
}

Lexicon sample_lexicon() { return {{"Mira", "young swordswoman, red scarf"}, {"Tomas", "old instructor, grey beard"}}; }

namespace {

const char* kNames[] = {"Arlo", "Bea", "Cyra", "Dov", "Esme"};
const char* kPlaces[] = {"the harbor", "the library", "the forest", "the market", "the tower"};
const char* kActions[] = {"opens the door", "reads a letter", "sits by the window", "looks at the map",
                          "drinks from a cup", "walks along the road"};
const char* kEstablishing[] = {"Rain falls on the rooftops.", "Morning light fills the valley.",
                               "The city sleeps under the moon.", "Wind bends the tall grass."};
const char* kLines[] = {"We should leave now.", "I found it.", "Wait for me!", "Why are you here?"};

template <class T, std::size_t N>
const T& pick(std::mt19937_64& rng, const T (&arr)[N]) {
    return arr[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

} // namespace

GeneratedScript random_script(std::mt19937_64& rng, const ScriptLimits& limits) {
    GeneratedScript out;
    const auto n_chars = std::uniform_int_distribution<std::size_t>(0, limits.max_characters)(rng);
    for (std::size_t i = 0; i < n_chars; ++i) out.lexicon.push_back({kNames[i], "figure number " + std::to_string(i)});
    const auto n_scenes = std::uniform_int_distribution<std::size_t>(1, limits.max_scenes)(rng);
    out.expected_scenes = n_scenes;
    for (std::size_t s = 0; s < n_scenes; ++s) {
        if (s) out.text += "\n";
        const auto n_shots = std::uniform_int_distribution<std::size_t>(1, limits.max_shots)(rng);
        out.expected_shots.push_back(n_shots);
        std::string narrative;
        for (std::size_t k = 0; k < n_shots; ++k) {
            const int kind = n_chars ? std::uniform_int_distribution<int>(0, 3)(rng) : 0;
            if (kind == 0) {
                out.text += pick(rng, kEstablishing);
            } else if (kind == 1) {
                const auto& who = out.lexicon[std::uniform_int_distribution<std::size_t>(0, n_chars - 1)(rng)].name;
                out.text += who + ": " + pick(rng, kLines);
            } else if (kind == 2) {
                const auto& who = out.lexicon[std::uniform_int_distribution<std::size_t>(0, n_chars - 1)(rng)].name;
                out.text += "In " + std::string(pick(rng, kPlaces)) + ", " + who + " " + pick(rng, kActions) + ".";
            } else {
                const auto& a = out.lexicon[std::uniform_int_distribution<std::size_t>(0, n_chars - 1)(rng)].name;
                const auto& b = out.lexicon[std::uniform_int_distribution<std::size_t>(0, n_chars - 1)(rng)].name;
                out.text += a + " " + pick(rng, kActions) + " while " + b + " stands beside the table.";
            }
            out.text += "\n";
        }
    }
    return out;
}

RunConfig base_config(const Lexicon& lexicon, std::uint64_t seed) {
    RunConfig c;
    c.characters = lexicon;
    c.seed = seed;
    return c;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path source_dir() { return STORYREEL_SOURCE_DIR; }

std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("storyreel_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixtures
