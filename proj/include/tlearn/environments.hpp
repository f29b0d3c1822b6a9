#pragma once

#include <cstddef>
#include <optional>

#include "tlearn/mdp.hpp"

namespace tlearn {

/// Parameters shared by the two skill environments.
///
/// Actions are numbered a_1..a_2n plus the skill action a* = a_{2n+1}. The
/// first n actions lead from the start to the low-skill branch, the next n to
/// the high-skill branch, and a* picks either branch with probability 1/2.
struct SkillEnvParams {
  std::size_t n = 5;
  std::size_t beam_hops = 6;
  /// Reward on reaching the end of the low-skill branch. Defaults to 1.1 for
  /// the small MDP and 1.0 for the beam when unset.
  std::optional<double> reward_easy;
  double reward_skill = 2.0;
  /// Probability that a* makes the next high-skill transition.
  double skill_success_prob = 1.0;
  /// Drop a* entirely, leaving 2n actions.
  bool include_skill_action = true;

  void validate() const;
};

inline constexpr double kSmallRewardEasy = 1.1;
inline constexpr double kBeamRewardEasy = 1.0;

/// Six-state MDP: start 1, low branch 2 -> 4, skill branch 3 -> {5, 6}.
Mdp build_small_skill_mdp(const SkillEnvParams& params);

/// Balance beam with 2h+4 states for h = beam_hops (16 states for h = 6).
/// Even chain 2, 4, ..., 2h+2 is deterministic; odd chain 3, 5, ..., 2h+3 is
/// walked reliably only by a*, every other action advancing or falling to
/// the last state with probability 1/2 each.
Mdp build_balance_beam(const SkillEnvParams& params);

/// Index of the skill action a* (always the last action).
inline ActionId skill_action(const Mdp& mdp) {
  return ActionId{static_cast<std::uint32_t>(mdp.num_actions() - 1)};
}

}  // namespace tlearn
