#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaitse/error.hpp"

// Locale-independent text helpers shared by the CSV readers and writers.
namespace gaitse::detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Splits on '\n'; a trailing '\r' is stripped from every line.
inline std::vector<std::string_view> split_lines(std::string_view doc) {
  std::vector<std::string_view> lines;
  while (!doc.empty()) {
    auto pos = doc.find('\n');
    auto line = doc.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (pos == std::string_view::npos) break;
    doc.remove_prefix(pos + 1);
  }
  return lines;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline double require_double(std::string_view s, std::size_t line, const char* what) {
  if (auto v = to_double(s)) return *v;
  throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(s) + "'");
}

inline std::int64_t require_int(std::string_view s, std::size_t line, const char* what) {
  if (auto v = to_int(s)) return *v;
  throw ParseError(line, std::string("non-integer ") + what + " '" + std::string(s) + "'");
}

/// Fixed-point with `decimals` digits; never prints "-0.000000".
inline std::string fixed(double v, int decimals = 6) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

/// Shortest representation that parses back to the identical double.
inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Recognizes `# key=value` comment lines.
inline std::optional<std::pair<std::string_view, std::string_view>> comment_key_value(std::string_view line) {
  if (line.empty() || line.front() != '#') return std::nullopt;
  line.remove_prefix(1);
  line = trim(line);
  auto eq = line.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return std::pair{trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

inline bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace gaitse::detail
