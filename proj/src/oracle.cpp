#include "tlearn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace tlearn {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
}

double expected_backup(const Mdp& mdp, StateId s, ActionId a, double gamma, const std::vector<double>& v) {
  double q = 0.0;
  for (const auto& o : mdp.row(s, a)) {
    if (o.prob <= 0.0) continue;
    q += o.prob * (mdp.reward(s, o.next) + gamma * v[o.next.index]);
  }
  return q;
}

std::vector<ActionId> argmax_within(const std::vector<double>& values, double tol) {
  std::vector<ActionId> out;
  const double best = *std::max_element(values.begin(), values.end());
  for (std::size_t a = 0; a < values.size(); ++a)
    if (best - values[a] <= tol) out.push_back(ActionId{static_cast<std::uint32_t>(a)});
  return out;
}

// Largest T over the any-action successors of s; 0 for terminals.
double best_edge(const Mdp& mdp, const TransitionValueTable& t, StateId s) {
  if (mdp.is_terminal(s)) return 0.0;
  const auto succ = mdp.successors(s);
  if (succ.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (auto x : succ) best = std::max(best, t.get(s, x));
  return best;
}

}  // namespace

ValueIterationResult value_iteration(const Mdp& mdp, double gamma, const SolverOptions& opts) {
  check_gamma(gamma);
  const std::size_t S = mdp.num_states(), A = mdp.num_actions();
  ValueIterationResult out;
  out.v.assign(S, 0.0);
  std::vector<double> next(S, 0.0);
  for (;;) {
    if (out.iterations >= opts.max_iterations) throw SolverDivergence("value_iteration: iteration cap reached");
    ++out.iterations;
    double residual = 0.0;
    for (std::uint32_t si = 0; si < S; ++si) {
      const StateId s{si};
      if (mdp.is_terminal(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (std::uint32_t a = 0; a < A; ++a) best = std::max(best, expected_backup(mdp, s, ActionId{a}, gamma, out.v));
      next[si] = best;
      residual = std::max(residual, std::abs(best - out.v[si]));
    }
    out.v.swap(next);
    out.residual = residual;
    if (residual < opts.tol) break;
  }
  out.q = QTable(S, A, 0.0);
  out.optimal_actions.assign(S, {});
  std::vector<double> qs(A);
  for (std::uint32_t si = 0; si < S; ++si) {
    const StateId s{si};
    if (mdp.is_terminal(s)) continue;
    for (std::uint32_t a = 0; a < A; ++a) {
      qs[a] = expected_backup(mdp, s, ActionId{a}, gamma, out.v);
      out.q.set(s, ActionId{a}, qs[a]);
    }
    out.optimal_actions[si] = argmax_within(qs, opts.tol);
  }
  return out;
}

TransitionValueTable t_sharp(const Mdp& mdp, double gamma, const SolverOptions& opts) {
  check_gamma(gamma);
  const std::size_t S = mdp.num_states();
  TransitionValueTable t(S, 0.0);
  for (std::uint32_t s = 0; s < S; ++s) {
    if (mdp.is_terminal(StateId{s})) continue;
    for (auto x : mdp.successors(StateId{s})) t.set(StateId{s}, x, 0.0);
  }
  for (std::size_t it = 0;; ++it) {
    if (it >= opts.max_iterations) throw SolverDivergence("t_sharp: iteration cap reached");
    TransitionValueTable next = t;
    double residual = 0.0;
    for (std::uint32_t si = 0; si < S; ++si) {
      const StateId s{si};
      if (mdp.is_terminal(s)) continue;
      for (auto x : mdp.successors(s)) {
        const double value = mdp.reward(s, x) + gamma * best_edge(mdp, t, x);
        residual = std::max(residual, std::abs(value - t.get(s, x)));
        next.set(s, x, value);
      }
    }
    t = std::move(next);
    if (residual < opts.tol) break;
  }
  return t;
}

double t_sharp_residual(const Mdp& mdp, double gamma, const TransitionValueTable& table) {
  double residual = 0.0;
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    const StateId s{si};
    if (mdp.is_terminal(s)) continue;
    for (auto x : mdp.successors(s))
      residual = std::max(residual, std::abs(mdp.reward(s, x) + gamma * best_edge(mdp, table, x) - table.get(s, x)));
  }
  return residual;
}

std::vector<double> relaxed_graph_values(const Mdp& mdp, double gamma, const SolverOptions& opts) {
  check_gamma(gamma);
  const std::size_t S = mdp.num_states();
  std::vector<double> v(S, 0.0), next(S, 0.0);
  for (std::size_t it = 0;; ++it) {
    if (it >= opts.max_iterations) throw SolverDivergence("relaxed_graph_values: iteration cap reached");
    double residual = 0.0;
    for (std::uint32_t si = 0; si < S; ++si) {
      const StateId s{si};
      const auto succ = mdp.successors(s);
      if (mdp.is_terminal(s) || succ.empty()) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (auto x : succ) best = std::max(best, mdp.reward(s, x) + gamma * v[x.index]);
      next[si] = best;
      residual = std::max(residual, std::abs(best - v[si]));
    }
    v.swap(next);
    if (residual < opts.tol) break;
  }
  return v;
}

std::vector<std::optional<StateId>> tau_map(const Mdp& mdp, double gamma, const SolverOptions& opts) {
  const auto v = relaxed_graph_values(mdp, gamma, opts);
  std::vector<std::optional<StateId>> tau(mdp.num_states());
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    const StateId s{si};
    const auto succ = mdp.successors(s);
    if (mdp.is_terminal(s) || succ.empty()) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (auto x : succ) {
      const double value = mdp.reward(s, x) + gamma * v[x.index];
      if (value > best + opts.tol) {
        best = value;
        tau[si] = x;
      }
    }
  }
  return tau;
}

namespace {

std::vector<std::vector<ActionId>> t_greedy_sets(const Mdp& mdp, const TransitionValueTable& t, double tol) {
  std::vector<std::vector<ActionId>> out(mdp.num_states());
  std::vector<double> scores(mdp.num_actions());
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    const StateId s{si};
    if (mdp.is_terminal(s)) continue;
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) {
      double score = 0.0;
      for (const auto& o : mdp.row(s, ActionId{a})) score += o.prob * t.get(s, o.next);
      scores[a] = score;
    }
    out[si] = argmax_within(scores, tol);
  }
  return out;
}

// Solver tolerance is kept well below the tie tolerance so that true ties are
// not split by iteration error.
SolverOptions tight(double tol) { return SolverOptions{std::max(tol * 1e-3, 1e-15), kDefaultSolverMaxIterations}; }

}  // namespace

PrecisionReport precision_check(const Mdp& mdp, double gamma, double tol) {
  const auto vi = value_iteration(mdp, gamma, tight(tol));
  const auto ts = t_sharp(mdp, gamma, tight(tol));
  const auto greedy = t_greedy_sets(mdp, ts, tol);
  PrecisionReport report;
  report.holds = true;
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    const StateId s{si};
    if (mdp.is_terminal(s)) continue;
    std::vector<double> qs(mdp.num_actions());
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) qs[a] = vi.q.get(s, ActionId{a});
    PrecisionStateReport row{s, greedy[si], argmax_within(qs, tol), false};
    row.agree = row.t_greedy == row.q_optimal;
    report.holds = report.holds && row.agree;
    report.per_state.push_back(std::move(row));
  }
  return report;
}

EnvClassReport env_class_check(const Mdp& mdp, double gamma, double epsilon_env) {
  if (!(epsilon_env > 0.0 && epsilon_env < 0.5)) throw std::invalid_argument("epsilon_env must lie in (0, 0.5)");
  const auto tau = tau_map(mdp, gamma);
  EnvClassReport report;
  report.epsilon_env = epsilon_env;
  report.holds = true;
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    if (!tau[si]) continue;
    const StateId s{si};
    EnvClassEdge edge{s, *tau[si], 0.0, -1.0, ActionId{0}, false, false};
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) {
      const double p = mdp.probability(s, ActionId{a}, edge.target);
      edge.mean_probability += p;
      if (p > edge.best_probability) {
        edge.best_probability = p;
        edge.best_action = ActionId{a};
      }
    }
    edge.mean_probability /= static_cast<double>(mdp.num_actions());
    edge.condition1 = edge.mean_probability > epsilon_env;
    edge.condition2 = edge.best_probability > 1.0 - epsilon_env;
    report.holds = report.holds && edge.condition1 && edge.condition2;
    report.edges.push_back(edge);
  }
  return report;
}

PolicyFn uniform_policy(const Mdp& mdp) {
  const std::size_t A = mdp.num_actions();
  return [A](StateId) { return std::vector<double>(A, 1.0 / static_cast<double>(A)); };
}

PolicyValues evaluate_policy(const Mdp& mdp, const PolicyFn& policy, double gamma, const SolverOptions& opts) {
  check_gamma(gamma);
  const std::size_t S = mdp.num_states(), A = mdp.num_actions();
  std::vector<std::vector<double>> pi(S);
  for (std::uint32_t s = 0; s < S; ++s)
    if (!mdp.is_terminal(StateId{s})) pi[s] = policy(StateId{s});

  PolicyValues out;
  // V^pi(s) = sum_a pi(s,a) sum_s' P [R + gamma V^pi(s')]
  out.v.assign(S, 0.0);
  std::vector<double> next(S, 0.0);
  for (std::size_t it = 0;; ++it) {
    if (it >= opts.max_iterations) throw SolverDivergence("evaluate_policy: V iteration cap reached");
    double residual = 0.0;
    for (std::uint32_t si = 0; si < S; ++si) {
      if (mdp.is_terminal(StateId{si})) continue;
      double value = 0.0;
      for (std::uint32_t a = 0; a < A; ++a)
        if (pi[si][a] > 0.0) value += pi[si][a] * expected_backup(mdp, StateId{si}, ActionId{a}, gamma, out.v);
      next[si] = value;
      residual = std::max(residual, std::abs(value - out.v[si]));
    }
    out.v.swap(next);
    if (residual < opts.tol) break;
  }

  // T^pi(s,s') = R(s,s') + gamma sum_a' pi(s',a') sum_s'' P T^pi(s',s'')
  TransitionValueTable t(S, 0.0);
  for (std::uint32_t s = 0; s < S; ++s)
    if (!mdp.is_terminal(StateId{s}))
      for (auto x : mdp.successors(StateId{s})) t.set(StateId{s}, x, 0.0);
  const auto continuation = [&](const TransitionValueTable& table, StateId x) {
    if (mdp.is_terminal(x)) return 0.0;
    double value = 0.0;
    for (std::uint32_t a = 0; a < A; ++a) {
      if (pi[x.index][a] <= 0.0) continue;
      for (const auto& o : mdp.row(x, ActionId{a})) value += pi[x.index][a] * o.prob * table.get(x, o.next);
    }
    return value;
  };
  for (std::size_t it = 0;; ++it) {
    if (it >= opts.max_iterations) throw SolverDivergence("evaluate_policy: T iteration cap reached");
    TransitionValueTable updated = t;
    double residual = 0.0;
    for (std::uint32_t si = 0; si < S; ++si) {
      const StateId s{si};
      if (mdp.is_terminal(s)) continue;
      for (auto x : mdp.successors(s)) {
        const double value = mdp.reward(s, x) + gamma * continuation(t, x);
        residual = std::max(residual, std::abs(value - t.get(s, x)));
        updated.set(s, x, value);
      }
    }
    t = std::move(updated);
    if (residual < opts.tol) break;
  }
  out.t = std::move(t);
  return out;
}

OracleSolution solve_oracle(const Mdp& mdp, double gamma, const SolverOptions& opts) {
  OracleSolution sol;
  sol.gamma = gamma;
  const auto inner = tight(opts.tol);
  auto vi = value_iteration(mdp, gamma, inner);
  sol.v_star = std::move(vi.v);
  sol.q_star = std::move(vi.q);
  sol.t_sharp = t_sharp(mdp, gamma, inner);
  sol.tau = tau_map(mdp, gamma, inner);
  sol.t_greedy_actions = t_greedy_sets(mdp, sol.t_sharp, opts.tol);
  sol.optimal_actions.assign(mdp.num_states(), {});
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    if (mdp.is_terminal(StateId{si})) continue;
    const auto row = sol.q_star.row(StateId{si});
    sol.optimal_actions[si] = argmax_within(std::vector<double>(row.begin(), row.end()), opts.tol);
  }

  std::vector<char> seen(mdp.num_states(), 0);
  std::deque<StateId> frontier{mdp.start()};
  seen[mdp.start().index] = 1;
  while (!frontier.empty()) {
    const StateId s = frontier.front();
    frontier.pop_front();
    if (mdp.is_terminal(s)) continue;
    sol.optimal_path_states.push_back(s);
    for (auto a : sol.optimal_actions[s.index])
      for (const auto& o : mdp.row(s, a))
        if (o.prob > 0.0 && !seen[o.next.index]) {
          seen[o.next.index] = 1;
          frontier.push_back(o.next);
        }
  }
  std::sort(sol.optimal_path_states.begin(), sol.optimal_path_states.end());

  std::vector<char> on_path(mdp.num_states(), 0);
  for (StateId s = mdp.start(); !mdp.is_terminal(s) && !on_path[s.index] && sol.tau[s.index];
       s = *sol.tau[s.index]) {
    on_path[s.index] = 1;
    sol.tau_path.push_back(s);
  }
  return sol;
}

}  // namespace tlearn
