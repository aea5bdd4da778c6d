#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchsql {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_space_char(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline char lower_char(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(lower_char(c));
    return out;
}

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && is_space_char(s[b])) ++b;
    while (e > b && is_space_char(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Question normalization: lowercase, drop every character that is not a
// letter, digit, whitespace, or a decimal point between two digits, then
// split on whitespace runs. Total on any input; never yields empty tokens.
inline std::vector<std::string> normalize_question(std::string_view text) {
    std::string kept;
    kept.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (is_ascii_alpha(c)) {
            kept.push_back(lower_char(c));
        } else if (is_ascii_digit(c) || is_space_char(c)) {
            kept.push_back(c);
        } else if (c == '.' && i > 0 && i + 1 < text.size() &&
                   is_ascii_digit(text[i - 1]) && is_ascii_digit(text[i + 1])) {
            kept.push_back(c); // decimal point inside a digit run
        }
        // everything else is removed outright
    }
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < kept.size()) {
        while (i < kept.size() && is_space_char(kept[i])) ++i;
        size_t start = i;
        while (i < kept.size() && !is_space_char(kept[i])) ++i;
        if (i > start) tokens.emplace_back(kept.substr(start, i - start));
    }
    return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens, size_t begin, size_t count) {
    std::string out;
    for (size_t i = begin; i < begin + count && i < tokens.size(); ++i) {
        if (!out.empty()) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

// Strict full-string numeric parse. Rejects NaN/infinity and partial matches.
inline std::optional<double> parse_number(std::string_view s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    std::string_view v = t;
    if (v.front() == '+') v.remove_prefix(1);
    if (v.empty()) return std::nullopt;
    double d = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
    if (!std::isfinite(d)) return std::nullopt;
    return d;
}

// Shortest decimal string that round-trips the double.
inline std::string format_number(double d) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    (void)ec;
    return std::string(buf, ptr);
}

// Comparison key for condition values: numbers fold to their canonical
// decimal form ("5.0" and "5" compare equal), everything else lowercases
// and trims.
inline std::string value_key(std::string_view v) {
    std::string t = to_lower(trim(v));
    if (auto d = parse_number(t)) return format_number(*d);
    return t;
}

} // namespace sketchsql
