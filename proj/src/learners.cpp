#include "tlearn/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tlearn {

void LearnerConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
  if (!std::isfinite(init_value)) throw std::invalid_argument("init_value must be finite");
}

double LearnerConfig::step_size(std::uint64_t prior_updates) const {
  if (schedule == AlphaSchedule::Harmonic) return 1.0 / (1.0 + static_cast<double>(prior_updates));
  return alpha;
}

void t_learn_step(TransitionValueTable& table, const StepRecord& rec, const LearnerConfig& cfg,
                  const TerminalSet& terminals) {
  double bootstrap = 0.0;
  if (!terminals.contains(rec.s_next)) {
    const auto best = table.max_observed(rec.s_next);
    if (!best)
      bootstrap = table.default_value();
    else
      bootstrap = cfg.bootstrap_includes_default ? std::max(*best, table.default_value()) : *best;
  }
  auto& e = table.entry(rec.s, rec.s_next);
  const double target = rec.r + cfg.gamma * bootstrap;
  e.value += cfg.step_size(e.updates) * (target - e.value);
  ++e.updates;
}

void onpolicy_t_step(TransitionValueTable& table, const StepRecord& rec, const std::optional<StepRecord>& next,
                     const LearnerConfig& cfg, const TerminalSet& terminals) {
  double bootstrap = 0.0;
  if (next) {
    if (next->s != rec.s_next)
      throw std::invalid_argument("onpolicy_t_step: next record starts at state " + std::to_string(label(next->s)) +
                                  ", expected " + std::to_string(label(rec.s_next)));
    if (!terminals.contains(rec.s_next)) bootstrap = table.get(next->s, next->s_next);
  } else if (!terminals.contains(rec.s_next)) {
    throw std::invalid_argument("onpolicy_t_step: missing successor record for non-terminal state " +
                                std::to_string(label(rec.s_next)));
  }
  auto& e = table.entry(rec.s, rec.s_next);
  const double target = rec.r + cfg.gamma * bootstrap;
  e.value += cfg.step_size(e.updates) * (target - e.value);
  ++e.updates;
}

void q_learn_step(QTable& q, const StepRecord& rec, const LearnerConfig& cfg, const TerminalSet& terminals) {
  const double bootstrap = terminals.contains(rec.s_next) ? 0.0 : q.max_value(rec.s_next);
  const double old = q.get(rec.s, rec.a);
  const double target = rec.r + cfg.gamma * bootstrap;
  q.set(rec.s, rec.a, old + cfg.step_size(q.updates(rec.s, rec.a)) * (target - old));
  q.record_update(rec.s, rec.a);
}

void td0_step(VTable& v, const StepRecord& rec, const LearnerConfig& cfg, const TerminalSet& terminals) {
  if (terminals.contains(rec.s)) return;
  const double bootstrap = terminals.contains(rec.s_next) ? 0.0 : v.get(rec.s_next);
  const double old = v.get(rec.s);
  const double target = rec.r + cfg.gamma * bootstrap;
  v.set(rec.s, old + cfg.step_size(v.updates(rec.s)) * (target - old));
  v.record_update(rec.s);
}

}  // namespace tlearn
