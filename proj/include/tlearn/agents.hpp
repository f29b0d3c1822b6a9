#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "tlearn/learners.hpp"
#include "tlearn/mdp.hpp"
#include "tlearn/policy.hpp"

namespace tlearn {

enum class Algorithm { TLearning, QLearning, Td0Model, OnPolicyT };

std::string_view to_string(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// Learner paired with its action-selection rule, as run inside a trial.
class LearningAgent : public EpisodeAgent {
 public:
  virtual Algorithm algorithm() const = 0;
  virtual void begin_episode() {}
  /// Exploitation action set at s: epsilon forced to 0, ties kept.
  virtual std::vector<ActionId> greedy_set(StateId s) const = 0;
  /// Learned transition values, for the agents that keep them.
  virtual const TransitionValueTable* transition_values() const { return nullptr; }
};

std::unique_ptr<LearningAgent> make_agent(Algorithm algo, const Mdp& mdp, const LearnerConfig& learner,
                                          const PolicyConfig& policy);

/// T-learning with the count-based T-value policy.
class TLearningAgent final : public LearningAgent {
 public:
  TLearningAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy);
  Algorithm algorithm() const override { return Algorithm::TLearning; }
  ActionId select_action(StateId s, RngStream& rng) override;
  void learn(const StepRecord& rec) override;
  std::vector<ActionId> greedy_set(StateId s) const override;
  const TransitionValueTable* transition_values() const override { return &table_; }
  const Counters& counters() const { return counters_; }
  TransitionValueTable& table() { return table_; }

 private:
  TerminalSet terminals_;
  std::size_t num_actions_;
  LearnerConfig learner_;
  PolicyConfig policy_;
  TransitionValueTable table_;
  Counters counters_;
  RewardModel model_;
};

/// On-policy transition TD with the same T-value policy. The update of
/// (s, s') waits for the next transition out of s'.
class OnPolicyTAgent final : public LearningAgent {
 public:
  OnPolicyTAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy);
  Algorithm algorithm() const override { return Algorithm::OnPolicyT; }
  void begin_episode() override { pending_.reset(); }
  ActionId select_action(StateId s, RngStream& rng) override;
  void learn(const StepRecord& rec) override;
  std::vector<ActionId> greedy_set(StateId s) const override;
  const TransitionValueTable* transition_values() const override { return &table_; }

 private:
  TerminalSet terminals_;
  std::size_t num_actions_;
  LearnerConfig learner_;
  PolicyConfig policy_;
  TransitionValueTable table_;
  Counters counters_;
  RewardModel model_;
  std::optional<StepRecord> pending_;
};

class QLearningAgent final : public LearningAgent {
 public:
  QLearningAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy);
  Algorithm algorithm() const override { return Algorithm::QLearning; }
  ActionId select_action(StateId s, RngStream& rng) override;
  void learn(const StepRecord& rec) override;
  std::vector<ActionId> greedy_set(StateId s) const override;
  const QTable& q() const { return q_; }
  QTable& q() { return q_; }

 private:
  TerminalSet terminals_;
  LearnerConfig learner_;
  PolicyConfig policy_;
  QTable q_;
};

/// TD(0) state values with a one-step lookahead through the learned model.
class Td0ModelAgent final : public LearningAgent {
 public:
  Td0ModelAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy);
  Algorithm algorithm() const override { return Algorithm::Td0Model; }
  ActionId select_action(StateId s, RngStream& rng) override;
  void learn(const StepRecord& rec) override;
  std::vector<ActionId> greedy_set(StateId s) const override;
  const VTable& v() const { return v_; }

 private:
  TerminalSet terminals_;
  LearnerConfig learner_;
  PolicyConfig policy_;
  VTable v_;
  Counters counters_;
  RewardModel model_;
};

}  // namespace tlearn
