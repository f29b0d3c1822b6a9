#include "tlearn/agents.hpp"

#include <stdexcept>

namespace tlearn {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::TLearning: return "t_learning";
    case Algorithm::QLearning: return "q_learning";
    case Algorithm::Td0Model: return "td0_model";
    case Algorithm::OnPolicyT: return "onpolicy_t";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::TLearning, Algorithm::QLearning, Algorithm::Td0Model, Algorithm::OnPolicyT})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

std::unique_ptr<LearningAgent> make_agent(Algorithm algo, const Mdp& mdp, const LearnerConfig& learner,
                                          const PolicyConfig& policy) {
  learner.validate();
  policy.validate();
  switch (algo) {
    case Algorithm::TLearning: return std::make_unique<TLearningAgent>(mdp, learner, policy);
    case Algorithm::QLearning: return std::make_unique<QLearningAgent>(mdp, learner, policy);
    case Algorithm::Td0Model: return std::make_unique<Td0ModelAgent>(mdp, learner, policy);
    case Algorithm::OnPolicyT: return std::make_unique<OnPolicyTAgent>(mdp, learner, policy);
  }
  throw std::invalid_argument("make_agent: unknown algorithm");
}

TLearningAgent::TLearningAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy)
    : terminals_(mdp.terminal_set()),
      num_actions_(mdp.num_actions()),
      learner_(learner),
      policy_(policy),
      table_(mdp.num_states(), learner.init_value),
      counters_(mdp.num_states(), mdp.num_actions()),
      model_(mdp.num_states(), mdp.num_actions()) {}

ActionId TLearningAgent::select_action(StateId s, RngStream& rng) {
  return t_policy_select(s, table_, counters_, policy_, rng, num_actions_);
}

void TLearningAgent::learn(const StepRecord& rec) {
  observe(counters_, model_, rec);
  t_learn_step(table_, rec, learner_, terminals_);
}

std::vector<ActionId> TLearningAgent::greedy_set(StateId s) const {
  return t_policy_greedy_set(s, table_, counters_, policy_.kappa, num_actions_);
}

OnPolicyTAgent::OnPolicyTAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy)
    : terminals_(mdp.terminal_set()),
      num_actions_(mdp.num_actions()),
      learner_(learner),
      policy_(policy),
      table_(mdp.num_states(), learner.init_value),
      counters_(mdp.num_states(), mdp.num_actions()),
      model_(mdp.num_states(), mdp.num_actions()) {}

ActionId OnPolicyTAgent::select_action(StateId s, RngStream& rng) {
  return t_policy_select(s, table_, counters_, policy_, rng, num_actions_);
}

void OnPolicyTAgent::learn(const StepRecord& rec) {
  observe(counters_, model_, rec);
  // Terminal arrivals are backed up first so the pending update sees them.
  const bool ends = terminals_.contains(rec.s_next);
  if (ends) onpolicy_t_step(table_, rec, std::nullopt, learner_, terminals_);
  if (pending_) onpolicy_t_step(table_, *pending_, rec, learner_, terminals_);
  if (ends)
    pending_.reset();
  else
    pending_ = rec;
}

std::vector<ActionId> OnPolicyTAgent::greedy_set(StateId s) const {
  return t_policy_greedy_set(s, table_, counters_, policy_.kappa, num_actions_);
}

QLearningAgent::QLearningAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy)
    : terminals_(mdp.terminal_set()),
      learner_(learner),
      policy_(policy),
      q_(mdp.num_states(), mdp.num_actions(), learner.init_value) {}

ActionId QLearningAgent::select_action(StateId s, RngStream& rng) {
  return q_epsilon_greedy(s, q_, policy_.epsilon, rng);
}

void QLearningAgent::learn(const StepRecord& rec) { q_learn_step(q_, rec, learner_, terminals_); }

std::vector<ActionId> QLearningAgent::greedy_set(StateId s) const { return q_greedy_set(s, q_); }

Td0ModelAgent::Td0ModelAgent(const Mdp& mdp, const LearnerConfig& learner, const PolicyConfig& policy)
    : terminals_(mdp.terminal_set()),
      learner_(learner),
      policy_(policy),
      v_(mdp.terminal_set(), learner.init_value),
      counters_(mdp.num_states(), mdp.num_actions()),
      model_(mdp.num_states(), mdp.num_actions()) {}

ActionId Td0ModelAgent::select_action(StateId s, RngStream& rng) {
  return v_model_policy(s, v_, counters_, model_, learner_.gamma, policy_, rng);
}

void Td0ModelAgent::learn(const StepRecord& rec) {
  observe(counters_, model_, rec);
  td0_step(v_, rec, learner_, terminals_);
}

std::vector<ActionId> Td0ModelAgent::greedy_set(StateId s) const {
  return v_model_greedy_set(s, v_, counters_, model_, learner_.gamma, policy_.kappa);
}

}  // namespace tlearn
