#pragma once

#include <cstdint>
#include <optional>

#include "tlearn/mdp.hpp"
#include "tlearn/tables.hpp"

namespace tlearn {

enum class AlphaSchedule {
  Constant,  // alpha every update
  Harmonic,  // 1 / (1 + prior updates of the entry)
};

struct LearnerConfig {
  double alpha = 0.5;
  double gamma = 0.85;
  double init_value = 0.0;
  AlphaSchedule schedule = AlphaSchedule::Constant;
  /// T-learning bootstrap also considers default_value() for successors that
  /// have not been observed yet. Only matters with negative rewards.
  bool bootstrap_includes_default = false;

  void validate() const;
  double step_size(std::uint64_t prior_updates) const;
};

// Each rule updates exactly one entry. Arrival at a terminal bootstraps 0.

/// T(s,s') += alpha [r + gamma max_s'' T(s',s'') - T(s,s')], the max taken over
/// the observed successors of s' (default_value() when there are none).
void t_learn_step(TransitionValueTable& table, const StepRecord& rec, const LearnerConfig& cfg,
                  const TerminalSet& terminals);

/// On-policy transition TD: bootstraps from the transition actually taken out
/// of s'. `next` is empty when s' is terminal; otherwise next->s must equal
/// rec.s_next. Throws std::invalid_argument on broken chaining.
void onpolicy_t_step(TransitionValueTable& table, const StepRecord& rec, const std::optional<StepRecord>& next,
                     const LearnerConfig& cfg, const TerminalSet& terminals);

void q_learn_step(QTable& q, const StepRecord& rec, const LearnerConfig& cfg, const TerminalSet& terminals);

void td0_step(VTable& v, const StepRecord& rec, const LearnerConfig& cfg, const TerminalSet& terminals);

}  // namespace tlearn
