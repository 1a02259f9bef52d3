#include "storyreel/digest.hpp"
#include "storyreel/embedding.hpp"
#include "storyreel/text.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace storyreel;

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(text::tokenize("Blue-and-white Porcelain, cup!") ==
          std::vector<std::string>{"blue", "and", "white", "porcelain", "cup"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("  ...  ").empty());
}

TEST_CASE("word search respects boundaries and ignores case") {
    CHECK(text::contains_word("the System AI waits", "system ai"));
    CHECK(text::contains_word("In Ye’s room", "Ye"));
    CHECK_FALSE(text::contains_word("Yellow light", "Ye"));
    CHECK_FALSE(text::contains_word("", "Ye"));
    CHECK(text::find_word("a Ye b Ye", "ye", 2) == 2);
}

TEST_CASE("sentence splitting keeps closing quotes and needs whitespace after the stop") {
    auto s = text::split_sentences("He said \"go.\" Then 3.5 cups fell! Why? Done");
    REQUIRE(s.size() == 4);
    CHECK(s[0] == "He said \"go.\"");
    CHECK(s[1] == "Then 3.5 cups fell!");
    CHECK(s[2] == "Why?");
    CHECK(s[3] == "Done");
}

TEST_CASE("slug, trim, normalize") {
    CHECK(text::slug("System AI") == "system_ai");
    CHECK(text::trim("  x \n") == "x");
    CHECK(text::normalize_space(" a \n\t b  ") == "a b");
    CHECK(text::is_blank(" \n\t"));
}

TEST_CASE("sha256 matches known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fnv1a64 matches reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("mix_seed separates streams and is stable") {
    CHECK(mix_seed(1, "a") == mix_seed(1, "a"));
    CHECK(mix_seed(1, "a") != mix_seed(1, "b"));
    CHECK(mix_seed(1, "a") != mix_seed(2, "a"));
}

TEST_CASE("embedding is unit length, zero for empty text") {
    auto e = embed("blue porcelain cup");
    double n = 0;
    for (double d : e.dims) n += d * d;
    CHECK(std::sqrt(n) == doctest::Approx(1.0));
    auto z = embed("");
    CHECK(z.dims.size() == kDefaultEmbeddingDim);
    CHECK(cosine(z, e) == 0.0);
    CHECK(cosine(e, e) == doctest::Approx(1.0));
}

TEST_CASE("property: cosine is symmetric and bounded") {
    std::mt19937_64 rng(5);
    const char* words[] = {"cup", "sword", "rain", "gate", "ye", "blue", "night"};
    for (int i = 0; i < 200; ++i) {
        std::string a, b;
        for (int k = 0; k < 4; ++k) {
            a += std::string(words[rng() % 7]) + " ";
            b += std::string(words[rng() % 7]) + " ";
        }
        const double ab = cosine(embed(a), embed(b));
        CHECK(ab == doctest::Approx(cosine(embed(b), embed(a))));
        CHECK(ab >= -1e-12);
        CHECK(ab <= 1.0 + 1e-12);
    }
}
