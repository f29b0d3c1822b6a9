#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlearn/rng.hpp"
#include "tlearn/types.hpp"

namespace tlearn {

inline constexpr std::size_t kDefaultMaxEpisodeSteps = 10000;

/// Membership mask over states.
class TerminalSet {
 public:
  TerminalSet() = default;
  explicit TerminalSet(std::size_t num_states) : mask_(num_states, 0) {}
  bool contains(StateId s) const { return s.index < mask_.size() && mask_[s.index] != 0; }
  void insert(StateId s) { mask_.at(s.index) = 1; }
  void erase(StateId s) { mask_.at(s.index) = 0; }
  std::size_t size() const { return mask_.size(); }
  friend bool operator==(const TerminalSet&, const TerminalSet&) = default;

 private:
  std::vector<char> mask_;
};

/// Finite tabular MDP with rewards attached to arrival edges (s, s').
///
/// Built once through the mutating setters and then shared read-only; none of
/// the const accessors touch mutable state, so a finished Mdp can be read from
/// any number of threads.
class Mdp {
 public:
  Mdp(std::string name, std::size_t num_states, std::size_t num_actions, StateId start);

  const std::string& name() const { return name_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  StateId start() const { return start_; }
  const TerminalSet& terminal_set() const { return terminals_; }
  bool is_terminal(StateId s) const { return terminals_.contains(s); }
  std::vector<StateId> terminals() const;

  void set_name(std::string name) { name_ = std::move(name); }
  void set_start(StateId s) { start_ = s; }
  void set_terminal(StateId s, bool terminal = true);
  /// Replaces the successor distribution of (s, a). Entries are kept sorted by
  /// successor; duplicate successors are merged.
  void set_row(StateId s, ActionId a, std::vector<Outcome> row);
  void set_reward(StateId s, StateId s_next, double value);
  void clear_reward(StateId s, StateId s_next);

  std::span<const Outcome> row(StateId s, ActionId a) const;
  double probability(StateId s, ActionId a, StateId s_next) const;

  /// Arrival reward R(s, s'); empty when never defined.
  std::optional<double> arrival_reward(StateId s, StateId s_next) const;
  /// Arrival reward, throwing std::out_of_range when undefined.
  double reward(StateId s, StateId s_next) const;
  /// All defined rewards, ordered by (s, s').
  std::vector<std::pair<std::pair<StateId, StateId>, double>> rewards() const;

  /// Successors reachable with positive probability under any action, sorted.
  std::span<const StateId> successors(StateId s) const;

  friend bool operator==(const Mdp& a, const Mdp& b);

 private:
  std::size_t row_index(StateId s, ActionId a) const;
  void rebuild_successors(StateId s);

  std::string name_;
  std::size_t num_states_;
  std::size_t num_actions_;
  StateId start_;
  TerminalSet terminals_;
  std::vector<std::vector<Outcome>> kernel_;  // num_states * num_actions rows
  std::vector<std::vector<std::pair<StateId, double>>> rewards_;  // per source, sorted
  std::vector<std::vector<StateId>> successors_;
};

/// Lists every violated Mdp invariant; empty iff the MDP is well formed.
std::vector<std::string> validate(const Mdp& mdp);

struct SampledTransition {
  StateId next;
  double reward = 0.0;
};

/// Draws s' ~ P(.|s, a) and returns it with R(s, s'). Throws
/// std::invalid_argument for a terminal s or an out-of-range state/action.
SampledTransition sample_transition(const Mdp& mdp, StateId s, ActionId a, RngStream& rng);

/// Decision maker driven by run_episode: asked for an action in each visited
/// state, then handed the resulting StepRecord.
class EpisodeAgent {
 public:
  virtual ~EpisodeAgent() = default;
  virtual ActionId select_action(StateId s, RngStream& rng) = 0;
  virtual void learn(const StepRecord& rec) = 0;
};

/// Adapts a pair of callables to EpisodeAgent.
class CallbackAgent final : public EpisodeAgent {
 public:
  using Select = std::function<ActionId(StateId, RngStream&)>;
  using Learn = std::function<void(const StepRecord&)>;

  CallbackAgent(Select select, Learn learn) : select_(std::move(select)), learn_(std::move(learn)) {}
  ActionId select_action(StateId s, RngStream& rng) override { return select_(s, rng); }
  void learn(const StepRecord& rec) override {
    if (learn_) learn_(rec);
  }

 private:
  Select select_;
  Learn learn_;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  bool truncated = false;  // max_steps reached before a terminal
};

/// Runs one episode from mdp.start(). Stops on arrival at a terminal or after
/// max_steps actions. Exceptions from the agent propagate unchanged.
EpisodeTrace run_episode(const Mdp& mdp, EpisodeAgent& agent, RngStream& rng,
                         std::size_t max_steps = kDefaultMaxEpisodeSteps);

}  // namespace tlearn
