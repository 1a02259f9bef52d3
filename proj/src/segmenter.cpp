#include "storyreel/segmenter.hpp"

#include "storyreel/digest.hpp"
#include "storyreel/errors.hpp"
#include "storyreel/text.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <utility>

namespace storyreel {

namespace {

struct Line {
    std::size_t begin;
    std::string_view text;
};

struct Block {
    std::size_t begin;
    std::vector<std::string_view> lines;
};

std::vector<Line> split_lines(std::string_view raw) {
    std::vector<Line> out;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto nl = raw.find('\n', pos);
        if (nl == std::string_view::npos) nl = raw.size();
        out.push_back({pos, raw.substr(pos, nl - pos)});
        pos = nl + 1;
    }
    return out;
}

std::vector<Block> split_blocks(std::string_view raw) {
    std::vector<Block> blocks;
    bool in_block = false;
    for (const auto& line : split_lines(raw)) {
        if (text::is_blank(line.text)) {
            in_block = false;
            continue;
        }
        if (!in_block) blocks.push_back({line.begin, {}});
        in_block = true;
        blocks.back().lines.push_back(line.text);
    }
    return blocks;
}

bool is_speaker_word(std::string_view w) {
    if (w.empty() || !std::isupper(static_cast<unsigned char>(w.front()))) return false;
    return std::all_of(w.begin(), w.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '\'' || c == '-' || c == '_';
    });
}

/// "Name: line" with a capitalised name of up to four words.
std::optional<std::pair<std::string, std::string>> parse_dialogue(std::string_view line) {
    const auto trimmed = text::trim(line);
    const auto colon = trimmed.find(':');
    if (colon == std::string::npos || colon == 0 || colon > 40) return std::nullopt;
    const auto name = text::trim(std::string_view(trimmed).substr(0, colon));
    const auto rest = text::trim(std::string_view(trimmed).substr(colon + 1));
    if (name.empty() || rest.empty()) return std::nullopt;
    std::size_t words = 0;
    std::size_t start = 0;
    while (start <= name.size()) {
        auto sp = name.find(' ', start);
        if (sp == std::string::npos) sp = name.size();
        if (!is_speaker_word(std::string_view(name).substr(start, sp - start))) return std::nullopt;
        ++words;
        start = sp + 1;
    }
    if (words > 4) return std::nullopt;
    return std::make_pair(name, rest);
}

class Cast {
public:
    explicit Cast(const Lexicon& lexicon) : lexicon_(lexicon) {}

    std::string resolve_speaker(const std::string& name) {
        for (const auto& e : lexicon_)
            if (text::to_lower(e.name) == text::to_lower(name)) return add(e.name, e.description);
        return add(name, "");
    }

    /// Lexicon characters mentioned in `passage`, ordered by first mention.
    std::vector<std::string> mentioned(std::string_view passage) {
        std::vector<std::pair<std::size_t, const LexiconEntry*>> hits;
        for (const auto& e : lexicon_) {
            auto pos = text::find_word(passage, e.name);
            if (pos != std::string_view::npos) hits.emplace_back(pos, &e);
        }
        std::stable_sort(hits.begin(), hits.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::string> ids;
        for (const auto& [pos, e] : hits) ids.push_back(add(e->name, e->description));
        return ids;
    }

    std::vector<CharacterProfile> roster() const { return roster_; }

private:
    std::string add(const std::string& name, const std::string& description) {
        auto id = character_id_for(name);
        for (const auto& c : roster_)
            if (c.id == id) return id;
        roster_.push_back({id, name, description});
        return id;
    }

    const Lexicon& lexicon_;
    std::vector<CharacterProfile> roster_;
};

void append_unique(std::vector<std::string>& out, const std::vector<std::string>& more) {
    for (const auto& m : more)
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
}

std::string two_digits(std::size_t n) {
    auto s = std::to_string(n);
    return s.size() < 2 ? "0" + s : s;
}

std::vector<std::string> normalized_tags(std::vector<std::string> tags) {
    for (auto& t : tags) t = text::to_lower(text::trim(t));
    tags.erase(std::remove(tags.begin(), tags.end(), std::string{}), tags.end());
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    return tags;
}

} // namespace

std::string character_id_for(std::string_view name) { return "char_" + text::slug(name); }

std::string detect_emotion(std::string_view passage) {
    static const std::vector<std::pair<std::string_view, std::string_view>> cues = {
        {"angrily", "angry"},     {"angry", "angry"},         {"furious", "angry"},
        {"furiously", "angry"},   {"shouts", "angry"},        {"yells", "angry"},
        {"sad", "sad"},           {"sadly", "sad"},           {"tears", "sad"},
        {"cries", "sad"},         {"crying", "sad"},          {"weeps", "sad"},
        {"happily", "happy"},     {"happy", "happy"},         {"laughs", "happy"},
        {"smiles", "happy"},      {"joyfully", "happy"},      {"afraid", "fearful"},
        {"scared", "fearful"},    {"trembling", "fearful"},   {"fearfully", "fearful"},
        {"surprised", "surprised"}, {"shocked", "surprised"}, {"gasps", "surprised"},
    };
    std::size_t best = std::string_view::npos;
    std::string_view label = "neutral";
    for (const auto& [cue, emotion] : cues) {
        auto pos = text::find_word(passage, cue);
        if (pos < best) {
            best = pos;
            label = emotion;
        }
    }
    return std::string(label);
}

bool has_spatial_cue(std::string_view passage) {
    static const std::vector<std::string_view> cues = {
        "left of",   "right of",  "to the left", "to the right", "left side", "right side",
        "behind",    "beside",    "next to",     "between",      "in front of", "foreground",
        "background", "above",    "below",       "across from",  "opposite",  "facing each other",
    };
    return std::any_of(cues.begin(), cues.end(),
                       [&](std::string_view c) { return text::contains_word(passage, c); });
}

Story segment_story(std::string_view raw_text, const Lexicon& lexicon) {
    Story story;
    story.raw_text = std::string(raw_text);
    story.id = "story_" + sha256_hex(raw_text).substr(0, 8);

    Cast cast(lexicon);
    const auto blocks = split_blocks(raw_text);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        Scene scene;
        scene.id = "scene_" + two_digits(b + 1);
        scene.span.begin = b == 0 ? 0 : blocks[b].begin;
        scene.span.end = b + 1 < blocks.size() ? blocks[b + 1].begin : raw_text.size();

        std::vector<std::string> block_text;
        std::string narrative;
        auto add_shot = [&](std::string description, std::vector<std::string> characters,
                            std::optional<DialogueLine> dialogue) {
            Shot shot;
            shot.id = scene.id + "_shot_" + two_digits(scene.shots.size() + 1);
            shot.characters = std::move(characters);
            shot.is_establishing = shot.characters.empty();
            shot.needs_layout = has_spatial_cue(description);
            shot.emotion = detect_emotion(description);
            shot.dialogue = std::move(dialogue);
            shot.description = std::move(description);
            scene.shots.push_back(std::move(shot));
        };
        auto flush_narrative = [&] {
            for (auto& sentence : text::split_sentences(narrative))
                add_shot(sentence, cast.mentioned(sentence), std::nullopt);
            narrative.clear();
        };

        for (auto line : blocks[b].lines) {
            block_text.push_back(std::string(line));
            if (auto dlg = parse_dialogue(line)) {
                flush_narrative();
                std::vector<std::string> characters{cast.resolve_speaker(dlg->first)};
                append_unique(characters, cast.mentioned(dlg->second));
                auto speaker = characters.front();
                add_shot(dlg->first + ": " + dlg->second, std::move(characters),
                         DialogueLine{speaker, dlg->second});
            } else {
                narrative.append(line);
                narrative.push_back('\n');
            }
        }
        flush_narrative();
        scene.prompt = text::normalize_space(text::join(block_text, " "));
        story.scenes.push_back(std::move(scene));
    }
    story.characters = cast.roster();
    return story;
}

StyleVector derive_styles(const Story& story, const StyleRules& rules) {
    StyleVector out;
    for (const auto& rule : rules.rules) {
        if (rule.keyword.empty() || !text::contains_word(story.raw_text, rule.keyword)) continue;
        (rule.channel == StyleChannel::visual ? out.visual_style : out.acoustic_style).push_back(rule.tag);
    }
    out.visual_style = normalized_tags(std::move(out.visual_style));
    out.acoustic_style = normalized_tags(std::move(out.acoustic_style));
    if (out.visual_style.empty()) out.visual_style = normalized_tags(rules.default_visual);
    if (out.acoustic_style.empty()) out.acoustic_style = normalized_tags(rules.default_acoustic);
    if (out.visual_style.empty()) out.visual_style = {"anime"};
    if (out.acoustic_style.empty()) out.acoustic_style = {"orchestral"};
    return out;
}

void to_json(json& j, const LexiconEntry& v) { j = json{{"name", v.name}, {"description", v.description}}; }
void from_json(const json& j, LexiconEntry& v) {
    if (j.is_string()) {
        v = {j.get<std::string>(), ""};
        return;
    }
    j.at("name").get_to(v.name);
    v.description = j.value("description", std::string{});
}

void to_json(json& j, const StyleRule& v) {
    j = json{{"keyword", v.keyword},
             {"tag", v.tag},
             {"channel", v.channel == StyleChannel::visual ? "visual" : "acoustic"}};
}
void from_json(const json& j, StyleRule& v) {
    j.at("keyword").get_to(v.keyword);
    j.at("tag").get_to(v.tag);
    const auto channel = j.value("channel", std::string("visual"));
    if (channel != "visual" && channel != "acoustic")
        throw ConfigError("style rule channel must be 'visual' or 'acoustic', got '" + channel + "'");
    v.channel = channel == "visual" ? StyleChannel::visual : StyleChannel::acoustic;
}

void to_json(json& j, const StyleRules& v) {
    j = json{{"rules", v.rules}, {"default_visual", v.default_visual}, {"default_acoustic", v.default_acoustic}};
}
void from_json(const json& j, StyleRules& v) {
    v = StyleRules{};
    v.rules = j.value("rules", std::vector<StyleRule>{});
    if (j.contains("default_visual")) j.at("default_visual").get_to(v.default_visual);
    if (j.contains("default_acoustic")) j.at("default_acoustic").get_to(v.default_acoustic);
}

} // namespace storyreel
