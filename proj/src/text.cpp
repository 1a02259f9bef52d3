#include "storyreel/text.hpp"

#include <cctype>

namespace storyreel::text {

namespace {

bool is_ascii_alnum(unsigned char c) noexcept { return c < 0x80 && std::isalnum(c) != 0; }

bool is_space(unsigned char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

unsigned char lower(unsigned char c) noexcept {
    return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c;
}

bool starts_with_at(std::string_view s, std::size_t i, std::string_view p) noexcept {
    return s.size() >= i + p.size() && s.substr(i, p.size()) == p;
}

constexpr std::string_view kEllipsis = "\xE2\x80\xA6";
constexpr std::string_view kRightDoubleQuote = "\xE2\x80\x9D";
constexpr std::string_view kRightSingleQuote = "\xE2\x80\x99";

} // namespace

bool is_word_byte(unsigned char c) noexcept { return c >= 0x80 || std::isalnum(c) != 0; }

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(lower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_blank(std::string_view s) noexcept {
    for (unsigned char c : s)
        if (!is_space(c)) return false;
    return true;
}

std::string normalize_space(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : s) {
        if (is_word_byte(c)) {
            cur.push_back(static_cast<char>(lower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::string slug(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (is_ascii_alnum(c)) {
            out.push_back(static_cast<char>(lower(c)));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from) {
    if (needle.empty() || haystack.size() < needle.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (lower(static_cast<unsigned char>(haystack[i + j])) !=
                lower(static_cast<unsigned char>(needle[j]))) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        const bool left_ok = i == 0 || !is_ascii_alnum(static_cast<unsigned char>(haystack[i - 1]));
        const std::size_t end = i + needle.size();
        const bool right_ok =
            end == haystack.size() || !is_ascii_alnum(static_cast<unsigned char>(haystack[end]));
        if (left_ok && right_ok) return i;
    }
    return std::string_view::npos;
}

bool contains_word(std::string_view haystack, std::string_view needle) {
    return find_word(haystack, needle) != std::string_view::npos;
}

std::vector<std::string> split_sentences(std::string_view prose) {
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        auto s = normalize_space(prose.substr(start, end - start));
        if (!s.empty()) out.push_back(std::move(s));
        start = end;
    };
    while (i < prose.size()) {
        const char c = prose[i];
        const bool ellipsis = starts_with_at(prose, i, kEllipsis);
        if (c != '.' && c != '!' && c != '?' && !ellipsis) {
            ++i;
            continue;
        }
        // consume the run of terminators, then any closing quotes or brackets
        while (i < prose.size()) {
            if (prose[i] == '.' || prose[i] == '!' || prose[i] == '?') {
                ++i;
            } else if (starts_with_at(prose, i, kEllipsis)) {
                i += kEllipsis.size();
            } else {
                break;
            }
        }
        while (i < prose.size()) {
            if (prose[i] == '"' || prose[i] == '\'' || prose[i] == ')' || prose[i] == ']') {
                ++i;
            } else if (starts_with_at(prose, i, kRightDoubleQuote) ||
                       starts_with_at(prose, i, kRightSingleQuote)) {
                i += 3;
            } else {
                break;
            }
        }
        if (i == prose.size() || is_space(static_cast<unsigned char>(prose[i]))) flush(i);
    }
    flush(prose.size());
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

} // namespace storyreel::text
