#include "tlearn/tables.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "tlearn/text_format.hpp"

namespace tlearn {

TransitionValueTable::TransitionValueTable(std::size_t num_states, double default_value)
    : default_value_(default_value), rows_(num_states) {}

double TransitionValueTable::get(StateId s, StateId s_next) const {
  for (const auto& e : rows_.at(s.index))
    if (e.next == s_next) return e.value;
  return default_value_;
}

bool TransitionValueTable::contains(StateId s, StateId s_next) const {
  const auto& row = rows_.at(s.index);
  return std::any_of(row.begin(), row.end(), [&](const Entry& e) { return e.next == s_next; });
}

TransitionValueTable::Entry& TransitionValueTable::entry(StateId s, StateId s_next) {
  if (s_next.index >= rows_.size()) throw std::out_of_range("TransitionValueTable: successor out of range");
  auto& row = rows_.at(s.index);
  auto it = std::lower_bound(row.begin(), row.end(), s_next,
                             [](const Entry& e, StateId key) { return e.next < key; });
  if (it == row.end() || it->next != s_next) it = row.insert(it, Entry{s_next, default_value_, 0});
  return *it;
}

void TransitionValueTable::set(StateId s, StateId s_next, double value) { entry(s, s_next).value = value; }

std::vector<StateId> TransitionValueTable::observed_successors(StateId s) const {
  std::vector<StateId> out;
  for (const auto& e : rows_.at(s.index)) out.push_back(e.next);
  return out;
}

std::optional<double> TransitionValueTable::max_observed(StateId s) const {
  const auto& row = rows_.at(s.index);
  if (row.empty()) return std::nullopt;
  double best = row.front().value;
  for (const auto& e : row) best = std::max(best, e.value);
  return best;
}

std::size_t TransitionValueTable::size() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.size();
  return n;
}

QTable::QTable(std::size_t num_states, std::size_t num_actions, double init_value)
    : num_states_(num_states),
      num_actions_(num_actions),
      values_(num_states * num_actions, init_value),
      updates_(num_states * num_actions, 0) {}

double QTable::max_value(StateId s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

VTable::VTable(const TerminalSet& terminals, double init_value)
    : terminals_(terminals), values_(terminals.size(), init_value), updates_(terminals.size(), 0) {
  for (std::uint32_t s = 0; s < values_.size(); ++s)
    if (terminals_.contains(StateId{s})) values_[s] = 0.0;
}

void VTable::set(StateId s, double v) {
  if (terminals_.contains(s)) return;
  values_.at(s.index) = v;
}

std::string dump_table(const TransitionValueTable& table) {
  std::ostringstream out;
  out << "[tvalues]\n";
  out << "default = " << format_double(table.default_value()) << "\n";
  for (std::uint32_t s = 0; s < table.num_states(); ++s)
    for (const auto& e : table.row(StateId{s}))
      out << s + 1 << ' ' << label(e.next) << ' ' << format_double(e.value) << ' ' << e.updates << "\n";
  return out.str();
}

TransitionValueTable load_transition_table(std::string_view text, std::size_t num_states) {
  const auto sections = parse_sections(text);
  if (sections.size() != 1 || sections.front().name != "tvalues")
    throw ParseError(1, "tvalues", "expected a single [tvalues] section");
  double default_value = 0.0;
  std::vector<std::pair<TextLine, std::vector<std::string>>> rows;
  for (const auto& line : sections.front().lines) {
    if (line.text.find('=') != std::string::npos) {
      const auto kv = parse_key_value(line);
      if (kv.key != "default") throw ParseError(line.line_no, kv.key, "unknown field");
      default_value = parse_double(kv.value, line.line_no, "default");
      continue;
    }
    rows.push_back({line, split_whitespace(line.text)});
  }
  TransitionValueTable table(num_states, default_value);
  for (const auto& [line, toks] : rows) {
    if (toks.size() != 3 && toks.size() != 4) throw ParseError(line.line_no, "tvalues", "expected 's s2 value [updates]'");
    const auto s = parse_uint(toks[0], line.line_no, "s");
    const auto s2 = parse_uint(toks[1], line.line_no, "s2");
    if (s < 1 || s > num_states || s2 < 1 || s2 > num_states)
      throw ParseError(line.line_no, "tvalues", "state outside 1.." + std::to_string(num_states));
    auto& e = table.entry(StateId{static_cast<std::uint32_t>(s - 1)}, StateId{static_cast<std::uint32_t>(s2 - 1)});
    e.value = parse_double(toks[2], line.line_no, "value");
    if (toks.size() == 4) e.updates = parse_uint(toks[3], line.line_no, "updates");
  }
  return table;
}

std::string dump_table(const QTable& table) {
  std::ostringstream out;
  out << "[qvalues]\n";
  for (std::uint32_t s = 0; s < table.num_states(); ++s)
    for (std::uint32_t a = 0; a < table.num_actions(); ++a)
      out << s + 1 << ' ' << a + 1 << ' ' << format_double(table.get(StateId{s}, ActionId{a})) << "\n";
  return out.str();
}

}  // namespace tlearn
