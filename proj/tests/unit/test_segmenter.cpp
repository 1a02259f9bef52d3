#include "fixtures.hpp"

#include "storyreel/segmenter.hpp"

#include <doctest.h>

using namespace storyreel;

TEST_CASE("blank script yields no scenes") {
    auto s = segment_story("  \n\n \t");
    CHECK(s.scenes.empty());
    CHECK(validate_story(s).empty());
}

TEST_CASE("sample script splits into scenes, sentence shots and dialogue shots") {
    const auto text = fixtures::sample_script();
    auto s = segment_story(text, fixtures::sample_lexicon());
    REQUIRE(s.scenes.size() == 2);
    CHECK(validate_story(s).empty());
    CHECK(s.scenes[0].id == "scene_01");
    CHECK(s.scenes[0].span.begin == 0);
    CHECK(s.scenes[1].span.end == text.size());
    CHECK(s.scenes[0].span.end == s.scenes[1].span.begin);

    const auto& a = s.scenes[0].shots;
    REQUIRE(a.size() == 3);
    CHECK(a[0].id == "scene_01_shot_01");
    CHECK(a[0].characters == std::vector<std::string>{"char_mira", "char_tomas"});
    CHECK(a[0].emotion == "angry");
    CHECK_FALSE(a[0].dialogue.has_value());
    REQUIRE(a[1].dialogue.has_value());
    CHECK(a[1].dialogue->speaker == "char_tomas");
    CHECK(a[1].dialogue->text == "Put that down!");
    CHECK(a[1].characters.front() == "char_tomas");

    const auto& b = s.scenes[1].shots;
    REQUIRE(b.size() == 2);
    CHECK(b[0].is_establishing);
    CHECK(b[0].characters.empty());
    CHECK(b[1].needs_layout);
    CHECK(b[1].characters == std::vector<std::string>{"char_mira"});

    REQUIRE(s.characters.size() == 2);
    CHECK(s.characters[0].name == "Mira");
    CHECK(s.characters[0].description == "young swordswoman, red scarf");
}

TEST_CASE("segmentation is deterministic and ids depend on the text") {
    auto a = segment_story(fixtures::sample_script(), fixtures::sample_lexicon());
    auto b = segment_story(fixtures::sample_script(), fixtures::sample_lexicon());
    CHECK(a == b);
    CHECK(a.id != segment_story("Other text.").id);
}

TEST_CASE("speaker outside the lexicon still becomes a character") {
    auto s = segment_story("Old Man Chen: Go home.\n");
    REQUIRE(s.scenes.size() == 1);
    REQUIRE(s.scenes[0].shots.size() == 1);
    REQUIRE(s.scenes[0].shots[0].dialogue.has_value());
    CHECK(s.scenes[0].shots[0].dialogue->speaker == character_id_for("Old Man Chen"));
    CHECK(s.find_character(character_id_for("Old Man Chen")) != nullptr);
}

TEST_CASE("emotion and spatial cues") {
    CHECK(detect_emotion("She laughs") == "happy");
    CHECK(detect_emotion("the system AI angrily try") == "angry");
    CHECK(detect_emotion("He walks") == "neutral");
    CHECK(has_spatial_cue("a lamp to the left of the desk"));
    CHECK(has_spatial_cue("standing between the pillars"));
    CHECK_FALSE(has_spatial_cue("a quiet valley at dawn"));
}

TEST_CASE("styles come from keyword rules, falling back to defaults") {
    StyleRules rules;
    rules.rules = {{"porcelain", "Ink Wash", StyleChannel::visual}, {"village", "guzheng", StyleChannel::acoustic},
                   {"cup", "ink wash", StyleChannel::visual}};
    auto yx = segment_story(fixtures::yx01_text(), fixtures::yx01_lexicon());
    auto st = derive_styles(yx, rules);
    CHECK(st.visual_style == std::vector<std::string>{"ink wash"});
    CHECK(st.acoustic_style == std::vector<std::string>{"orchestral"});

    StyleRules empty;
    empty.default_visual.clear();
    empty.default_acoustic.clear();
    auto fallback = derive_styles(yx, empty);
    CHECK(fallback.visual_style == std::vector<std::string>{"anime"});
    CHECK(fallback.acoustic_style == std::vector<std::string>{"orchestral"});
}

TEST_CASE("property: generated scripts segment into valid stories of the expected shape") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
        auto g = fixtures::random_script(rng);
        auto s = segment_story(g.text, g.lexicon);
        CHECK(validate_story(s).empty());
        REQUIRE(s.scenes.size() == g.expected_scenes);
        for (std::size_t k = 0; k < s.scenes.size(); ++k) CHECK(s.scenes[k].shots.size() == g.expected_shots[k]);
        for (const auto& sc : s.scenes)
            for (const auto& sh : sc.shots) {
                CHECK(sh.is_establishing == sh.characters.empty());
                for (const auto& c : sh.characters) CHECK(s.find_character(c) != nullptr);
            }
    }
}
