#include "tlearn/text_format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace tlearn {

ParseError::ParseError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + (field.empty() ? "" : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<TextSection> parse_sections(std::string_view text) {
  std::vector<TextSection> sections;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ParseError(line_no, "", "empty section name");
      sections.push_back({std::string(name), line_no, {}});
      continue;
    }
    if (sections.empty()) throw ParseError(line_no, "", "statement outside of any section");
    sections.back().lines.push_back({line_no, std::string(line)});
  }
  return sections;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

KeyValue parse_key_value(const TextLine& line) {
  const auto eq = line.text.find('=');
  if (eq == std::string::npos) throw ParseError(line.line_no, "", "expected 'key = value'");
  std::string_view view(line.text);
  KeyValue kv{std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1)))};
  if (kv.key.empty()) throw ParseError(line.line_no, "", "missing key before '='");
  return kv;
}

double parse_double(std::string_view token, std::size_t line, const std::string& field) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ParseError(line, field, "expected a number, got '" + std::string(token) + "'");
  return value;
}

std::uint64_t parse_uint(std::string_view token, std::size_t line, const std::string& field) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(line, field, "expected a non-negative integer, got '" + std::string(token) + "'");
  return value;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace tlearn
