#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlearn/mdp.hpp"
#include "tlearn/types.hpp"

namespace tlearn {

/// Sparse transition values T(s, s').
///
/// An entry exists only for pairs that were updated or seeded; every other
/// lookup returns default_value(). The observed successors of s are exactly
/// the keys (s, .) present in the table.
class TransitionValueTable {
 public:
  struct Entry {
    StateId next;
    double value = 0.0;
    std::uint64_t updates = 0;  // drives the harmonic step size
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  TransitionValueTable() = default;
  explicit TransitionValueTable(std::size_t num_states, double default_value = 0.0);

  std::size_t num_states() const { return rows_.size(); }
  double default_value() const { return default_value_; }

  double get(StateId s, StateId s_next) const;
  bool contains(StateId s, StateId s_next) const;
  /// Seeds or overwrites an entry without counting it as an update.
  void set(StateId s, StateId s_next, double value);
  /// Returns the entry for (s, s'), creating it at default_value() if absent.
  Entry& entry(StateId s, StateId s_next);

  /// Entries of row s sorted by successor.
  std::span<const Entry> row(StateId s) const { return rows_.at(s.index); }
  std::vector<StateId> observed_successors(StateId s) const;
  /// Largest value among observed successors of s; empty if none.
  std::optional<double> max_observed(StateId s) const;
  std::size_t size() const;

  friend bool operator==(const TransitionValueTable&, const TransitionValueTable&) = default;

 private:
  double default_value_ = 0.0;
  std::vector<std::vector<Entry>> rows_;
};

/// Dense action values Q(s, a).
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t num_states, std::size_t num_actions, double init_value = 0.0);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  double get(StateId s, ActionId a) const { return values_[index(s, a)]; }
  void set(StateId s, ActionId a, double v) { values_[index(s, a)] = v; }
  std::uint64_t updates(StateId s, ActionId a) const { return updates_[index(s, a)]; }
  void record_update(StateId s, ActionId a) { ++updates_[index(s, a)]; }
  std::span<const double> row(StateId s) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(s.index) * num_actions_, num_actions_);
  }
  double max_value(StateId s) const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s.index) * num_actions_ + a.index;
  }
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> updates_;
};

/// Dense state values V(s); terminal states are pinned to 0.
class VTable {
 public:
  VTable() = default;
  VTable(const TerminalSet& terminals, double init_value = 0.0);

  std::size_t num_states() const { return values_.size(); }
  double get(StateId s) const { return values_.at(s.index); }
  void set(StateId s, double v);
  bool is_terminal(StateId s) const { return terminals_.contains(s); }
  std::uint64_t updates(StateId s) const { return updates_.at(s.index); }
  void record_update(StateId s) { ++updates_.at(s.index); }

  friend bool operator==(const VTable&, const VTable&) = default;

 private:
  TerminalSet terminals_;
  std::vector<double> values_;
  std::vector<std::uint64_t> updates_;
};

// Text dumps: sorted keys, 1-based indices, round-trip exact values.
//
//   [tvalues]
//   default = 0
//   1 3 1.7 12      # s s' value updates
std::string dump_table(const TransitionValueTable& table);
TransitionValueTable load_transition_table(std::string_view text, std::size_t num_states);
std::string dump_table(const QTable& table);

}  // namespace tlearn
