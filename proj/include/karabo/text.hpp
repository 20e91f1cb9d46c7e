#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace karabo::text {

std::string trim(std::string_view s);
std::string ascii_lower(std::string_view s);

/// Full Unicode case folding of a UTF-8 string.
std::string case_fold(std::string_view s);

/// Collapses every run of whitespace to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// "a", "a and b", "a, b, and c".
std::string join_series(const std::vector<std::string>& items);

bool contains(std::string_view haystack, std::string_view needle);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t mix64(std::uint64_t x);

/// Substitutes `{name}` placeholders. `{{` and `}}` are literal braces.
/// Throws E_TEMPLATE on an unknown or unterminated placeholder.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values);

/// Placeholder names referenced by a template, in order of first use.
std::vector<std::string> template_placeholders(std::string_view tmpl);

using TimePoint = std::chrono::system_clock::time_point;

/// RFC 3339 in UTC with millisecond precision: 2026-01-02T03:04:05.678Z
std::string format_rfc3339(TimePoint tp);
TimePoint parse_rfc3339(std::string_view s);

}  // namespace karabo::text
