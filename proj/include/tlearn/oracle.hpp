#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tlearn/mdp.hpp"
#include "tlearn/tables.hpp"

namespace tlearn {

inline constexpr double kDefaultSolverTol = 1e-10;
inline constexpr std::size_t kDefaultSolverMaxIterations = 100000;

/// Raised when a fixed-point iteration exhausts its iteration cap.
class SolverDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double tol = kDefaultSolverTol;
  std::size_t max_iterations = kDefaultSolverMaxIterations;
};

struct ValueIterationResult {
  std::vector<double> v;  // V*, 0 at terminals
  QTable q;               // Q*
  std::vector<std::vector<ActionId>> optimal_actions;  // empty for terminals
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Synchronous value iteration until the sup-norm change drops below tol.
/// Argmax sets treat values within tol as tied.
ValueIterationResult value_iteration(const Mdp& mdp, double gamma, const SolverOptions& opts = {});

/// Fixed point of the T-learning rule over the any-action transition graph:
/// T(s,s') = R(s,s') + gamma * max_{s'' in succ(s')} T(s',s''), 0 past
/// terminals. Entries exist exactly on positive-probability edges.
TransitionValueTable t_sharp(const Mdp& mdp, double gamma, const SolverOptions& opts = {});

/// Sup-norm residual of a T-table against the T-learning fixed-point equation.
double t_sharp_residual(const Mdp& mdp, double gamma, const TransitionValueTable& table);

/// Optimal values when every graph edge can be taken deterministically.
std::vector<double> relaxed_graph_values(const Mdp& mdp, double gamma, const SolverOptions& opts = {});

/// Preferred successor of each non-terminal state: the neighbor s' with the
/// highest R(s,s') + gamma * V_relaxed(s'); lowest index on ties.
std::vector<std::optional<StateId>> tau_map(const Mdp& mdp, double gamma, const SolverOptions& opts = {});

struct PrecisionStateReport {
  StateId s;
  std::vector<ActionId> t_greedy;   // argmax_a sum_s' P(s'|s,a) T#(s,s')
  std::vector<ActionId> q_optimal;  // argmax_a Q*(s,a)
  bool agree = false;
};

struct PrecisionReport {
  bool holds = false;
  std::vector<PrecisionStateReport> per_state;
};

/// Checks that acting greedily on the T-learning fixed point with the true
/// kernel picks exactly the Q*-optimal actions in every non-terminal state.
PrecisionReport precision_check(const Mdp& mdp, double gamma, double tol = kDefaultSolverTol);

struct EnvClassEdge {
  StateId s;
  StateId target;           // tau(s)
  double mean_probability;  // average over actions of P(tau(s)|s,a)
  double best_probability;
  ActionId best_action;
  bool condition1 = false;  // mean_probability > epsilon_env
  bool condition2 = false;  // best_probability > 1 - epsilon_env
};

struct EnvClassReport {
  double epsilon_env = 0.0;
  std::vector<EnvClassEdge> edges;
  bool holds = false;
};

EnvClassReport env_class_check(const Mdp& mdp, double gamma, double epsilon_env);

/// Stochastic policy as action probabilities per state.
using PolicyFn = std::function<std::vector<double>(StateId)>;
PolicyFn uniform_policy(const Mdp& mdp);

struct PolicyValues {
  std::vector<double> v;   // V^pi, from the state-value recursion
  TransitionValueTable t;  // T^pi, from the transition-value recursion
};

/// Iterates the V^pi and T^pi recursions independently to their fixed points.
PolicyValues evaluate_policy(const Mdp& mdp, const PolicyFn& policy, double gamma, const SolverOptions& opts = {});

/// Everything the experiment harness compares learners against.
struct OracleSolution {
  double gamma = 0.0;
  std::vector<double> v_star;
  QTable q_star;
  TransitionValueTable t_sharp;
  std::vector<std::vector<ActionId>> optimal_actions;
  std::vector<std::optional<StateId>> tau;
  std::vector<std::vector<ActionId>> t_greedy_actions;
  /// Non-terminal states reachable from the start under optimal actions.
  std::vector<StateId> optimal_path_states;
  /// Non-terminal states on the tau-path from the start.
  std::vector<StateId> tau_path;
};

OracleSolution solve_oracle(const Mdp& mdp, double gamma, const SolverOptions& opts = {});

}  // namespace tlearn
