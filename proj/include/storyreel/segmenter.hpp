#pragma once

#include "storyreel/domain.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace storyreel {

/// A known character: name as written in the script plus an optional visual description.
struct LexiconEntry {
    std::string name;
    std::string description;
    bool operator==(const LexiconEntry&) const = default;
};

using Lexicon = std::vector<LexiconEntry>;

std::string character_id_for(std::string_view name);

/// Breaks a script into scenes (blank-line separated blocks) and shots (sentences and
/// "Name: line" dialogue lines). Deterministic; blank input yields a story with no scenes.
Story segment_story(std::string_view raw_text, const Lexicon& lexicon = {});

enum class StyleChannel { visual, acoustic };

struct StyleRule {
    std::string keyword;
    std::string tag;
    StyleChannel channel = StyleChannel::visual;
};

struct StyleRules {
    std::vector<StyleRule> rules;
    std::vector<std::string> default_visual{"anime"};
    std::vector<std::string> default_acoustic{"orchestral"};
};

StyleVector derive_styles(const Story& story, const StyleRules& rules);

/// Emotion label of a passage ("neutral" when no cue word is present).
std::string detect_emotion(std::string_view text);

/// True when the passage carries explicit placement language (left of, behind, between...).
bool has_spatial_cue(std::string_view text);

void to_json(json& j, const LexiconEntry& v);
void from_json(const json& j, LexiconEntry& v);
void to_json(json& j, const StyleRule& v);
void from_json(const json& j, StyleRule& v);
void to_json(json& j, const StyleRules& v);
void from_json(const json& j, StyleRules& v);

} // namespace storyreel
