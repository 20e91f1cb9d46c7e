#include "karabo/text.hpp"

#include <openssl/evp.h>
#include <unicode/ucasemap.h>
#include <unicode/utypes.h>

#include <array>
#include <cctype>
#include <charconv>
#include <ctime>
#include <memory>

#include "karabo/error.hpp"

namespace karabo::text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string case_fold(std::string_view s) {
  if (s.empty()) return {};
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UCaseMap, decltype(&ucasemap_close)> map(
      ucasemap_open(nullptr, U_FOLD_CASE_DEFAULT, &status), &ucasemap_close);
  if (U_FAILURE(status)) return ascii_lower(s);

  std::string out(s.size() * 3 + 4, '\0');
  const auto len = static_cast<int32_t>(s.size());
  int32_t written = ucasemap_utf8FoldCase(map.get(), out.data(),
                                          static_cast<int32_t>(out.size()), s.data(),
                                          len, &status);
  if (status == U_BUFFER_OVERFLOW_ERROR) {
    status = U_ZERO_ERROR;
    out.assign(static_cast<std::size_t>(written), '\0');
    written = ucasemap_utf8FoldCase(map.get(), out.data(),
                                    static_cast<int32_t>(out.size()), s.data(), len,
                                    &status);
  }
  if (U_FAILURE(status)) return ascii_lower(s);
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string join_series(const std::vector<std::string>& items) {
  if (items.empty()) return {};
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    out += items[i];
    out += ", ";
  }
  out += "and ";
  out += items.back();
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

template <typename OnLiteral, typename OnPlaceholder>
void scan_template(std::string_view tmpl, OnLiteral&& literal, OnPlaceholder&& placeholder) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const char c = tmpl[i];
    if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      literal('{');
      i += 2;
    } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      literal('}');
      i += 2;
    } else if (c == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close == std::string_view::npos) {
        throw Error(ErrorCode::Template, "unterminated placeholder in template");
      }
      placeholder(std::string(tmpl.substr(i + 1, close - i - 1)));
      i = close + 1;
    } else {
      literal(c);
      ++i;
    }
  }
}

}  // namespace

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  scan_template(
      tmpl, [&](char c) { out.push_back(c); },
      [&](const std::string& name) {
        const auto it = values.find(name);
        if (it == values.end()) {
          throw Error(ErrorCode::Template, "unknown placeholder {" + name + "}");
        }
        out += it->second;
      });
  return out;
}

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  scan_template(
      tmpl, [](char) {},
      [&](const std::string& name) {
        for (const auto& n : names) {
          if (n == name) return;
        }
        names.push_back(name);
      });
  return names;
}

std::string format_rfc3339(TimePoint tp) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(tp.time_since_epoch());
  auto secs = duration_cast<seconds>(ms);
  auto frac = (ms - secs).count();
  if (frac < 0) {
    frac += 1000;
    secs -= seconds(1);
  }
  const std::time_t t = static_cast<std::time_t>(secs.count());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(frac));
  return buf;
}

namespace {

int parse_fixed(std::string_view s, std::size_t pos, std::size_t width) {
  if (pos + width > s.size()) throw Error(ErrorCode::Schema, "truncated timestamp");
  int v = 0;
  const auto* first = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + width, v);
  if (ec != std::errc{} || ptr != first + width) {
    throw Error(ErrorCode::Schema, "malformed timestamp: " + std::string(s));
  }
  return v;
}

}  // namespace

TimePoint parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') ||
      s[13] != ':' || s[16] != ':') {
    throw Error(ErrorCode::Schema, "malformed timestamp: " + std::string(s));
  }
  const int y = parse_fixed(s, 0, 4);
  const int mo = parse_fixed(s, 5, 2);
  const int d = parse_fixed(s, 8, 2);
  const int h = parse_fixed(s, 11, 2);
  const int mi = parse_fixed(s, 14, 2);
  const int se = parse_fixed(s, 17, 2);
  std::size_t pos = 19;
  milliseconds frac{0};
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int digits = 0;
    int value = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 3) {
        value = value * 10 + (s[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    while (digits < 3) {
      value *= 10;
      ++digits;
    }
    frac = milliseconds(value);
  }
  minutes offset{0};
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    const int sign = s[pos] == '-' ? -1 : 1;
    const int oh = parse_fixed(s, pos + 1, 2);
    if (pos + 3 >= s.size() || s[pos + 3] != ':') {
      throw Error(ErrorCode::Schema, "malformed timestamp offset: " + std::string(s));
    }
    const int om = parse_fixed(s, pos + 4, 2);
    offset = minutes(sign * (oh * 60 + om));
    pos += 6;
  } else {
    throw Error(ErrorCode::Schema, "timestamp lacks a UTC offset: " + std::string(s));
  }
  if (pos != s.size()) throw Error(ErrorCode::Schema, "trailing data in timestamp");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorCode::Schema, "invalid date: " + std::string(s));
  const sys_days days{ymd};
  const auto tp = days + hours(h) + minutes(mi) + seconds(se) + frac - offset;
  return time_point_cast<system_clock::duration>(tp);
}

}  // namespace karabo::text
