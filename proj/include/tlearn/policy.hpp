#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tlearn/rng.hpp"
#include "tlearn/tables.hpp"
#include "tlearn/types.hpp"

namespace tlearn {

struct PolicyConfig {
  double epsilon = 0.1;  // probability of a uniformly random action
  double kappa = 0.75;   // mass an untried action puts on the best-valued successor

  void validate() const;
};

/// Visit counts C_sa and C_sas' behind the empirical transition model.
class Counters {
 public:
  struct SuccessorCount {
    StateId next;
    std::uint64_t count = 0;
  };

  Counters() = default;
  Counters(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::uint64_t c_sa(StateId s, ActionId a) const { return c_sa_[index(s, a)]; }
  std::uint64_t c_sas(StateId s, ActionId a, StateId s_next) const;
  std::span<const SuccessorCount> successor_counts(StateId s, ActionId a) const { return c_sas_[index(s, a)]; }
  /// Successors seen from s under any action, sorted.
  std::span<const StateId> seen_successors(StateId s) const { return seen_.at(s.index); }
  /// True iff s has never been left (no seen successor, every C_sa zero).
  bool unvisited(StateId s) const { return seen_.at(s.index).empty(); }

  void increment(StateId s, ActionId a, StateId s_next);

 private:
  std::size_t index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s.index) * num_actions_ + a.index;
  }
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<std::uint64_t> c_sa_;
  std::vector<std::vector<SuccessorCount>> c_sas_;
  std::vector<std::vector<StateId>> seen_;
};

/// Running-mean reward per observed (s, a, s').
class RewardModel {
 public:
  RewardModel() = default;
  RewardModel(std::size_t num_states, std::size_t num_actions);

  std::optional<double> mean(StateId s, ActionId a, StateId s_next) const;
  void add(StateId s, ActionId a, StateId s_next, double r);

 private:
  struct Cell {
    StateId next;
    double mean = 0.0;
    std::uint64_t count = 0;
  };
  std::size_t num_actions_ = 0;
  std::vector<std::vector<Cell>> cells_;
};

/// Records one transition in both the counters and the reward model.
void observe(Counters& counters, RewardModel& model, const StepRecord& rec);

/// Estimated successor distribution of (s, a).
///
/// A tried action uses the empirical ratios C_sas'/C_sa. An untried action
/// puts kappa on s* = argmax of T(s, .) over the seen successors of s (lowest
/// index on ties) and spreads 1 - kappa evenly over the other seen
/// successors; a lone seen successor gets probability 1. Successors seeded
/// into the T-table count as seen. Returns empty when s has no data at all.
std::optional<std::vector<Outcome>> estimate_action_distribution(const Counters& counters,
                                                                 const TransitionValueTable& table, StateId s,
                                                                 ActionId a, double kappa);

/// sum_s' p(s'|s,a) T(s,s') for every action, written to `scores`. Returns
/// false (and leaves scores untouched) when s has no data.
bool t_action_scores(const Counters& counters, const TransitionValueTable& table, StateId s, double kappa,
                     std::vector<double>& scores);

/// Indices within tolerance of the maximum score.
std::vector<ActionId> argmax_set(std::span<const double> scores);

/// Action selection from T-values with the count-based model: epsilon-uniform,
/// otherwise uniform over the best expected T-value. States without data tie
/// every action.
ActionId t_policy_select(StateId s, const TransitionValueTable& table, const Counters& counters,
                         const PolicyConfig& cfg, RngStream& rng, std::size_t num_actions);
/// Exploitation set of t_policy_select (epsilon forced to 0).
std::vector<ActionId> t_policy_greedy_set(StateId s, const TransitionValueTable& table, const Counters& counters,
                                          double kappa, std::size_t num_actions);

ActionId q_epsilon_greedy(StateId s, const QTable& q, double epsilon, RngStream& rng);
std::vector<ActionId> q_greedy_set(StateId s, const QTable& q);

/// One-step lookahead on state values: argmax_a sum_s' p(s'|s,a) (r(s,a,s') +
/// gamma V(s')). Untried actions use the same kappa-biased distribution, with
/// s* the seen successor of highest V and the reward estimate taken as 0.
ActionId v_model_policy(StateId s, const VTable& v, const Counters& counters, const RewardModel& model,
                        double gamma, const PolicyConfig& cfg, RngStream& rng);
std::vector<ActionId> v_model_greedy_set(StateId s, const VTable& v, const Counters& counters,
                                         const RewardModel& model, double gamma, double kappa);

}  // namespace tlearn
