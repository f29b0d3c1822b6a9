#pragma once

#include <compare>
#include <cstdint>

namespace tlearn {

// Dense 0-based indices. Every text format renders them 1-based.
struct StateId {
  std::uint32_t index = 0;
  friend constexpr auto operator<=>(StateId, StateId) = default;
};

struct ActionId {
  std::uint32_t index = 0;
  friend constexpr auto operator<=>(ActionId, ActionId) = default;
};

constexpr StateId state_label(std::uint32_t one_based) { return StateId{one_based - 1}; }
constexpr ActionId action_label(std::uint32_t one_based) { return ActionId{one_based - 1}; }
constexpr std::uint32_t label(StateId s) { return s.index + 1; }
constexpr std::uint32_t label(ActionId a) { return a.index + 1; }

/// One observed transition: previous state, action taken, arrival state and
/// the reward received on arrival.
struct StepRecord {
  StateId s;
  ActionId a;
  StateId s_next;
  double r = 0.0;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// A successor state with its probability (kernel rows, estimated models).
struct Outcome {
  StateId next;
  double prob = 0.0;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

}  // namespace tlearn
