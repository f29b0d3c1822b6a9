#include "tlearn/mdp_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace tlearn {

namespace {

struct Meta {
  std::optional<std::string> name;
  std::optional<std::uint64_t> num_states;
  std::optional<std::uint64_t> num_actions;
  std::optional<std::uint64_t> start;
  std::optional<std::vector<std::uint64_t>> terminals;
};

StateId parse_state(std::string_view tok, std::size_t line, const std::string& field, std::uint64_t num_states) {
  const auto v = parse_uint(tok, line, field);
  if (v < 1 || v > num_states)
    throw ParseError(line, field, "state " + std::string(tok) + " outside 1.." + std::to_string(num_states));
  return StateId{static_cast<std::uint32_t>(v - 1)};
}

Meta read_meta(const TextSection& section) {
  Meta meta;
  for (const auto& line : section.lines) {
    const auto kv = parse_key_value(line);
    if (kv.key == "name") {
      meta.name = kv.value;
    } else if (kv.key == "num_states") {
      meta.num_states = parse_uint(kv.value, line.line_no, kv.key);
    } else if (kv.key == "num_actions") {
      meta.num_actions = parse_uint(kv.value, line.line_no, kv.key);
    } else if (kv.key == "start") {
      meta.start = parse_uint(kv.value, line.line_no, kv.key);
    } else if (kv.key == "terminals") {
      std::vector<std::uint64_t> ts;
      for (const auto& tok : split_whitespace(kv.value)) ts.push_back(parse_uint(tok, line.line_no, kv.key));
      meta.terminals = std::move(ts);
    } else {
      throw ParseError(line.line_no, kv.key, "unknown meta field");
    }
  }
  return meta;
}

template <typename T>
const T& require(const std::optional<T>& v, const TextSection& section, const char* field) {
  if (!v) throw ParseError(section.line_no, field, "missing required meta field '" + std::string(field) + "'");
  return *v;
}

}  // namespace

Mdp load_mdp(std::string_view text) {
  const auto sections = parse_sections(text);
  const TextSection* meta_sec = nullptr;
  const TextSection* reward_sec = nullptr;
  const TextSection* kernel_sec = nullptr;
  for (const auto& sec : sections) {
    const TextSection** slot = nullptr;
    if (sec.name == "meta") slot = &meta_sec;
    else if (sec.name == "rewards") slot = &reward_sec;
    else if (sec.name == "kernel") slot = &kernel_sec;
    else throw ParseError(sec.line_no, sec.name, "unknown section");
    if (*slot != nullptr) throw ParseError(sec.line_no, sec.name, "duplicate section");
    *slot = &sec;
  }
  if (meta_sec == nullptr) throw ParseError(1, "meta", "missing [meta] section");
  if (kernel_sec == nullptr) throw ParseError(meta_sec->line_no, "kernel", "missing [kernel] section");

  const Meta meta = read_meta(*meta_sec);
  const auto num_states = require(meta.num_states, *meta_sec, "num_states");
  const auto num_actions = require(meta.num_actions, *meta_sec, "num_actions");
  const auto start = require(meta.start, *meta_sec, "start");
  if (num_states == 0) throw ParseError(meta_sec->line_no, "num_states", "must be positive");
  if (num_actions == 0) throw ParseError(meta_sec->line_no, "num_actions", "must be positive");
  if (start < 1 || start > num_states) throw ParseError(meta_sec->line_no, "start", "outside 1..num_states");

  Mdp mdp(meta.name.value_or("unnamed"), num_states, num_actions, StateId{static_cast<std::uint32_t>(start - 1)});
  for (auto t : meta.terminals.value_or(std::vector<std::uint64_t>{})) {
    if (t < 1 || t > num_states) throw ParseError(meta_sec->line_no, "terminals", "state outside 1..num_states");
    mdp.set_terminal(StateId{static_cast<std::uint32_t>(t - 1)});
  }

  if (reward_sec != nullptr) {
    for (const auto& line : reward_sec->lines) {
      const auto toks = split_whitespace(line.text);
      if (toks.size() != 3) throw ParseError(line.line_no, "rewards", "expected 'from to value'");
      const auto from = parse_state(toks[0], line.line_no, "rewards.from", num_states);
      const auto to = parse_state(toks[1], line.line_no, "rewards.to", num_states);
      if (mdp.arrival_reward(from, to)) throw ParseError(line.line_no, "rewards", "duplicate reward edge");
      mdp.set_reward(from, to, parse_double(toks[2], line.line_no, "rewards.value"));
    }
  }

  // Explicit rows first, then wildcard rows fill the remaining actions.
  std::map<std::uint32_t, std::vector<Outcome>> wildcard;
  std::vector<char> explicit_row(num_states * num_actions, 0);
  for (const auto& line : kernel_sec->lines) {
    const auto toks = split_whitespace(line.text);
    if (toks.size() < 5 || toks[2] != ":" || (toks.size() - 3) % 2 != 0)
      throw ParseError(line.line_no, "kernel", "expected 'state action : successor prob ...'");
    const auto s = parse_state(toks[0], line.line_no, "kernel.state", num_states);
    std::vector<Outcome> row;
    for (std::size_t i = 3; i < toks.size(); i += 2)
      row.push_back({parse_state(toks[i], line.line_no, "kernel.successor", num_states),
                     parse_double(toks[i + 1], line.line_no, "kernel.prob")});
    if (toks[1] == "*") {
      if (wildcard.contains(s.index)) throw ParseError(line.line_no, "kernel", "duplicate wildcard row");
      wildcard.emplace(s.index, std::move(row));
      continue;
    }
    const auto a = parse_uint(toks[1], line.line_no, "kernel.action");
    if (a < 1 || a > num_actions)
      throw ParseError(line.line_no, "kernel.action", "action outside 1.." + std::to_string(num_actions));
    auto& seen = explicit_row[s.index * num_actions + (a - 1)];
    if (seen) throw ParseError(line.line_no, "kernel", "duplicate row for state/action");
    seen = 1;
    mdp.set_row(s, ActionId{static_cast<std::uint32_t>(a - 1)}, std::move(row));
  }
  for (const auto& [s, row] : wildcard)
    for (std::uint32_t a = 0; a < num_actions; ++a)
      if (!explicit_row[s * num_actions + a]) mdp.set_row(StateId{s}, ActionId{a}, row);

  // Unlisted rewards default to 0 on every reachable edge.
  for (std::uint32_t s = 0; s < num_states; ++s)
    for (auto next : mdp.successors(StateId{s}))
      if (!mdp.arrival_reward(StateId{s}, next)) mdp.set_reward(StateId{s}, next, 0.0);
  return mdp;
}

std::string serialize_mdp(const Mdp& mdp) {
  std::ostringstream out;
  out << "[meta]\n";
  out << "name = " << mdp.name() << "\n";
  out << "num_states = " << mdp.num_states() << "\n";
  out << "num_actions = " << mdp.num_actions() << "\n";
  out << "start = " << label(mdp.start()) << "\n";
  out << "terminals =";
  for (auto t : mdp.terminals()) out << ' ' << label(t);
  out << "\n\n[rewards]\n";
  for (const auto& [edge, value] : mdp.rewards())
    out << label(edge.first) << ' ' << label(edge.second) << ' ' << format_double(value) << "\n";

  out << "\n[kernel]\n";
  auto write_row = [&out](std::span<const Outcome> row) {
    out << " :";
    for (const auto& o : row) out << ' ' << label(o.next) << ' ' << format_double(o.prob);
    out << "\n";
  };
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    const StateId s{si};
    // The most frequent non-empty row becomes the wildcard.
    std::map<std::vector<std::pair<std::uint32_t, double>>, std::size_t> freq;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> keys(mdp.num_actions());
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) {
      for (const auto& o : mdp.row(s, ActionId{a})) keys[a].push_back({o.next.index, o.prob});
      if (!keys[a].empty()) ++freq[keys[a]];
    }
    const std::vector<std::pair<std::uint32_t, double>>* common = nullptr;
    std::size_t best = 1;
    // A wildcard would also fill empty rows on reload, so skip it then.
    const bool has_empty = std::any_of(keys.begin(), keys.end(), [](const auto& k) { return k.empty(); });
    for (const auto& [key, count] : freq)
      if (!has_empty && count > best) {
        best = count;
        common = &key;
      }
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) {
      if (keys[a].empty() || (common != nullptr && keys[a] == *common)) continue;
      out << label(s) << ' ' << a + 1;
      write_row(mdp.row(s, ActionId{a}));
    }
    if (common != nullptr) {
      for (std::uint32_t a = 0; a < mdp.num_actions(); ++a)
        if (keys[a] == *common) {
          out << label(s) << " *";
          write_row(mdp.row(s, ActionId{a}));
          break;
        }
    }
  }
  return out.str();
}

Mdp load_mdp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open MDP file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_mdp(buf.str());
}

}  // namespace tlearn
