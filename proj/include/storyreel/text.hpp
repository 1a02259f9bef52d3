#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace storyreel::text {

/// ASCII letters and digits, plus every byte >= 0x80 so UTF-8 words stay whole.
bool is_word_byte(unsigned char c) noexcept;

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool is_blank(std::string_view s) noexcept;

/// Collapses runs of whitespace into a single space and trims the ends.
std::string normalize_space(std::string_view s);

/// Lowercase tokens split on non-word bytes, in order of appearance (duplicates kept).
std::vector<std::string> tokenize(std::string_view s);

/// Lowercase slug: word bytes kept, everything else collapsed into '_'.
std::string slug(std::string_view s);

/// Case-insensitive search for `needle` at ASCII word boundaries. Returns npos when absent.
std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from = 0);

bool contains_word(std::string_view haystack, std::string_view needle);

/// Splits prose on sentence terminators (. ! ? and the ellipsis character) that are
/// followed by whitespace or end of text. Closing quotes stay with their sentence.
std::vector<std::string> split_sentences(std::string_view prose);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

} // namespace storyreel::text
