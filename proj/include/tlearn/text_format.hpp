#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tlearn {

/// Parse failure carrying the 1-based line and the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Shared dialect of the MDP and experiment-config files: `[section]` headers,
// one statement per line, `#` starts a comment, blank lines ignored.
struct TextLine {
  std::size_t line_no = 0;
  std::string text;  // comment stripped and trimmed, never empty
};

struct TextSection {
  std::string name;
  std::size_t line_no = 0;
  std::vector<TextLine> lines;
};

std::vector<TextSection> parse_sections(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

struct KeyValue {
  std::string key;
  std::string value;
};
/// Splits `key = value`; throws ParseError when there is no '='.
KeyValue parse_key_value(const TextLine& line);

double parse_double(std::string_view token, std::size_t line, const std::string& field);
std::uint64_t parse_uint(std::string_view token, std::size_t line, const std::string& field);

/// Shortest decimal form that reads back to the identical double.
std::string format_double(double value);

}  // namespace tlearn
