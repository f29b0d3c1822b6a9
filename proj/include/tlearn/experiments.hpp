#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlearn/agents.hpp"
#include "tlearn/environments.hpp"
#include "tlearn/oracle.hpp"

namespace tlearn {

enum class EnvKind { Small, Beam, File };

inline SkillEnvParams beam_defaults() {
  SkillEnvParams p;
  p.n = 50;
  return p;
}

struct EnvSpec {
  EnvKind kind = EnvKind::Beam;
  SkillEnvParams params = beam_defaults();
  std::string mdp_path;  // EnvKind::File only
};

/// Generated environments, or a loaded file that must pass validate().
Mdp build_env(const EnvSpec& env);
/// Short name used in exports: "small", "beam", or the MDP's own name.
std::string env_label(const EnvSpec& env, const Mdp& mdp);

struct ExperimentConfig {
  std::string experiment_id;  // defaults to "<env>_<algo>_a<actions>" when empty
  EnvSpec env;
  Algorithm algorithm = Algorithm::TLearning;
  LearnerConfig learner;
  PolicyConfig policy;
  std::size_t trials = 50;
  std::uint64_t master_seed = 0;
  std::size_t convergence_window = 50;  // consecutive passing evaluations
  std::size_t eval_every = 10;          // episodes between evaluations
  std::size_t max_episodes = 1'000'000;
  std::uint64_t max_total_steps = 5'000'000;
  std::size_t max_episode_steps = kDefaultMaxEpisodeSteps;
  /// 1-based states whose arrivals are counted per episode; empty picks
  /// 2, 3 and the last state (2, 3, 16 on the standard beam).
  std::vector<std::uint32_t> trace_states;

  void validate() const;
};

/// Per-episode arrival counts for a fixed list of states.
struct VisitTrace {
  std::vector<StateId> states;
  std::vector<std::uint16_t> counts;  // episode-major, states.size() per episode

  std::size_t episodes() const { return states.empty() ? 0 : counts.size() / states.size(); }
  std::uint16_t count(std::size_t episode, std::size_t state_slot) const {
    return counts[episode * states.size() + state_slot];
  }
  friend bool operator==(const VisitTrace&, const VisitTrace&) = default;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  /// Actions executed up to the first evaluation of the sustained passing
  /// streak (all actions run when the trial did not converge).
  std::uint64_t steps_to_policy_convergence = 0;
  std::uint64_t episodes_to_policy_convergence = 0;
  /// T-learning only: first episode whose T-table ranks successors like T#.
  std::optional<std::uint64_t> episodes_to_t_convergence;
  bool converged = false;
  std::uint64_t total_steps = 0;
  std::uint64_t total_episodes = 0;
  VisitTrace visits;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct AggregateResult {
  std::string experiment_id;
  Algorithm algorithm = Algorithm::TLearning;
  std::string env;
  std::size_t n_actions = 0;
  std::vector<TrialResult> trials;

  double mean_steps = 0.0;
  std::optional<double> std_steps;  // sample std, absent for one trial
  double mean_episodes = 0.0;
  std::optional<double> std_episodes;
  std::optional<double> mean_t_episodes;
  std::size_t converged_trials = 0;

  bool all_converged() const { return converged_trials == trials.size(); }
  friend bool operator==(const AggregateResult&, const AggregateResult&) = default;
};

/// Recomputes the summary statistics from the raw trials.
AggregateResult aggregate(std::string experiment_id, Algorithm algorithm, std::string env, std::size_t n_actions,
                          std::vector<TrialResult> trials);

/// Exploitation policy picks only Q*-optimal actions on every non-terminal
/// state reachable under the optimal policy. Tie sets must be subsets.
bool detect_policy_convergence(const LearningAgent& agent, const OracleSolution& oracle);

/// The preferred successors of T match those of T# along the tau-path. Only
/// observed successors count, so an unvisited path state fails.
bool detect_t_convergence(const TransitionValueTable& table, const OracleSolution& oracle);

/// One learning trial with the RNG derived from (master_seed, trial_index).
TrialResult run_trial(const ExperimentConfig& cfg, const Mdp& mdp, const OracleSolution& oracle,
                      std::size_t trial_index);
TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

/// Runs cfg.trials trials on up to `jobs` threads. The result does not depend
/// on `jobs`.
AggregateResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

struct SweepCell {
  std::size_t n = 0;
  std::size_t n_actions = 0;
  AggregateResult t_learning;
  AggregateResult q_learning;
  double ratio_episodes = 0.0;  // Q mean episodes / T mean episodes
  double ratio_steps = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  /// Least-squares slope of log2(ratio_episodes) against log2(n_actions):
  /// the ratio grows by 2^exponent per doubling of the action space.
  double fitted_exponent = 0.0;
};

/// Paired T-learning / Q-learning experiments for each n. The base config's
/// algorithm is ignored.
SweepResult sweep_actions(const ExperimentConfig& base, std::span<const std::size_t> n_values, std::size_t jobs = 1);

struct OptimisticCell {
  std::size_t n = 0;
  std::size_t n_actions = 0;
  AggregateResult baseline;    // Q-learning from the base init value
  AggregateResult optimistic;  // Q-learning from `init_value`
  double ratio_episodes = 0.0;  // optimistic / baseline
};

std::vector<OptimisticCell> optimistic_study(const ExperimentConfig& base, std::span<const std::size_t> n_values,
                                             double init_value, std::size_t jobs = 1);

/// Least-squares slope of log2(y) against log2(x).
double fit_loglog_exponent(std::span<const double> x, std::span<const double> y);

/// First 1-based episode from which the trailing `window`-episode arrival
/// count of `preferred` stays strictly above that of `other` through the end
/// of the trace. Empty when the preference does not hold at the last episode.
std::optional<std::size_t> sustained_crossover(const VisitTrace& trace, StateId preferred, StateId other,
                                               std::size_t window);

}  // namespace tlearn
