#include "tlearn/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tlearn {

void PolicyConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0,1]");
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0,1)");
}

Counters::Counters(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      c_sa_(num_states * num_actions, 0),
      c_sas_(num_states * num_actions),
      seen_(num_states) {}

std::uint64_t Counters::c_sas(StateId s, ActionId a, StateId s_next) const {
  for (const auto& sc : c_sas_[index(s, a)])
    if (sc.next == s_next) return sc.count;
  return 0;
}

void Counters::increment(StateId s, ActionId a, StateId s_next) {
  const auto i = index(s, a);
  ++c_sa_.at(i);
  auto& row = c_sas_[i];
  auto it = std::lower_bound(row.begin(), row.end(), s_next,
                             [](const SuccessorCount& c, StateId key) { return c.next < key; });
  if (it == row.end() || it->next != s_next) it = row.insert(it, SuccessorCount{s_next, 0});
  ++it->count;
  auto& seen = seen_[s.index];
  auto pos = std::lower_bound(seen.begin(), seen.end(), s_next);
  if (pos == seen.end() || *pos != s_next) seen.insert(pos, s_next);
}

RewardModel::RewardModel(std::size_t num_states, std::size_t num_actions)
    : num_actions_(num_actions), cells_(num_states * num_actions) {}

std::optional<double> RewardModel::mean(StateId s, ActionId a, StateId s_next) const {
  for (const auto& c : cells_.at(static_cast<std::size_t>(s.index) * num_actions_ + a.index))
    if (c.next == s_next) return c.mean;
  return std::nullopt;
}

void RewardModel::add(StateId s, ActionId a, StateId s_next, double r) {
  auto& row = cells_.at(static_cast<std::size_t>(s.index) * num_actions_ + a.index);
  auto it = std::find_if(row.begin(), row.end(), [&](const Cell& c) { return c.next == s_next; });
  if (it == row.end()) {
    row.push_back(Cell{s_next, 0.0, 0});
    it = std::prev(row.end());
  }
  ++it->count;
  it->mean += (r - it->mean) / static_cast<double>(it->count);
}

void observe(Counters& counters, RewardModel& model, const StepRecord& rec) {
  counters.increment(rec.s, rec.a, rec.s_next);
  model.add(rec.s, rec.a, rec.s_next, rec.r);
}

namespace {

constexpr double kTieTolerance = 1e-12;

// Position of the seen successor with the highest value; first one on ties.
template <typename ValueOf>
std::size_t best_successor(std::span<const StateId> seen, ValueOf value_of) {
  std::size_t best = 0;
  double best_value = value_of(seen[0]);
  for (std::size_t i = 1; i < seen.size(); ++i) {
    const double v = value_of(seen[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

double untried_weight(std::size_t i, std::size_t best, std::size_t m, double kappa) {
  if (m == 1) return 1.0;
  return i == best ? kappa : (1.0 - kappa) / static_cast<double>(m - 1);
}

// Expected value of an untried action: kappa-biased mix over seen successors.
template <typename RankBy, typename Payoff>
double untried_score(std::span<const StateId> seen, double kappa, RankBy rank_by, Payoff payoff) {
  const std::size_t best = best_successor(seen, rank_by);
  double score = 0.0;
  for (std::size_t i = 0; i < seen.size(); ++i) score += untried_weight(i, best, seen.size(), kappa) * payoff(seen[i]);
  return score;
}

ActionId uniform_action(std::size_t num_actions, RngStream& rng) {
  return ActionId{static_cast<std::uint32_t>(rng.uniform_index(num_actions))};
}

// Uniform choice among the maximal scores without materialising the set.
ActionId pick_argmax(std::span<const double> scores, RngStream& rng) {
  double best = *std::max_element(scores.begin(), scores.end());
  const double tol = kTieTolerance * std::max(1.0, std::abs(best));
  std::size_t ties = 0;
  for (double v : scores)
    if (best - v <= tol) ++ties;
  std::size_t k = rng.uniform_index(ties);
  for (std::size_t a = 0; a < scores.size(); ++a)
    if (best - scores[a] <= tol && k-- == 0) return ActionId{static_cast<std::uint32_t>(a)};
  return ActionId{0};
}

std::vector<ActionId> all_actions(std::size_t n) {
  std::vector<ActionId> out(n);
  for (std::uint32_t a = 0; a < n; ++a) out[a] = ActionId{a};
  return out;
}

bool v_action_scores(const Counters& counters, const RewardModel& model, const VTable& v, StateId s, double gamma,
                     double kappa, std::vector<double>& scores) {
  const auto seen = counters.seen_successors(s);
  if (seen.empty()) return false;
  const auto value = [&](StateId x) { return v.get(x); };
  const double untried = untried_score(seen, kappa, value, [&](StateId x) { return gamma * v.get(x); });
  scores.assign(counters.num_actions(), untried);
  for (std::uint32_t ai = 0; ai < counters.num_actions(); ++ai) {
    const ActionId a{ai};
    const auto c_sa = counters.c_sa(s, a);
    if (c_sa == 0) continue;
    double score = 0.0;
    for (const auto& sc : counters.successor_counts(s, a)) {
      const double p = static_cast<double>(sc.count) / static_cast<double>(c_sa);
      score += p * (model.mean(s, a, sc.next).value_or(0.0) + gamma * v.get(sc.next));
    }
    scores[ai] = score;
  }
  return true;
}

// Successors an untried action may reach: those seen in the counters plus any
// seeded into the T-table (warm start).
std::span<const StateId> candidate_successors(const Counters& counters, const TransitionValueTable& table, StateId s,
                                              std::vector<StateId>& buffer) {
  const auto seen = counters.seen_successors(s);
  const auto row = table.row(s);
  if (row.size() <= seen.size()) {
    bool covered = true;
    for (const auto& e : row)
      if (!std::binary_search(seen.begin(), seen.end(), e.next)) {
        covered = false;
        break;
      }
    if (covered) return seen;
  }
  buffer.assign(seen.begin(), seen.end());
  for (const auto& e : row) buffer.push_back(e.next);
  std::sort(buffer.begin(), buffer.end());
  buffer.erase(std::unique(buffer.begin(), buffer.end()), buffer.end());
  return buffer;
}

}  // namespace

std::optional<std::vector<Outcome>> estimate_action_distribution(const Counters& counters,
                                                                 const TransitionValueTable& table, StateId s,
                                                                 ActionId a, double kappa) {
  const auto c_sa = counters.c_sa(s, a);
  std::vector<Outcome> dist;
  if (c_sa > 0) {
    for (const auto& sc : counters.successor_counts(s, a))
      dist.push_back({sc.next, static_cast<double>(sc.count) / static_cast<double>(c_sa)});
    return dist;
  }
  std::vector<StateId> buffer;
  const auto seen = candidate_successors(counters, table, s, buffer);
  if (seen.empty()) return std::nullopt;
  const std::size_t best = best_successor(seen, [&](StateId x) { return table.get(s, x); });
  for (std::size_t i = 0; i < seen.size(); ++i) dist.push_back({seen[i], untried_weight(i, best, seen.size(), kappa)});
  return dist;
}

bool t_action_scores(const Counters& counters, const TransitionValueTable& table, StateId s, double kappa,
                     std::vector<double>& scores) {
  thread_local std::vector<StateId> buffer;
  const auto seen = candidate_successors(counters, table, s, buffer);
  if (seen.empty()) return false;
  const auto t_of = [&](StateId x) { return table.get(s, x); };
  const double untried = untried_score(seen, kappa, t_of, t_of);
  scores.assign(counters.num_actions(), untried);
  for (std::uint32_t ai = 0; ai < counters.num_actions(); ++ai) {
    const ActionId a{ai};
    const auto c_sa = counters.c_sa(s, a);
    if (c_sa == 0) continue;
    double score = 0.0;
    for (const auto& sc : counters.successor_counts(s, a))
      score += static_cast<double>(sc.count) / static_cast<double>(c_sa) * table.get(s, sc.next);
    scores[ai] = score;
  }
  return true;
}

std::vector<ActionId> argmax_set(std::span<const double> scores) {
  std::vector<ActionId> out;
  if (scores.empty()) return out;
  const double best = *std::max_element(scores.begin(), scores.end());
  const double tol = kTieTolerance * std::max(1.0, std::abs(best));
  for (std::size_t a = 0; a < scores.size(); ++a)
    if (best - scores[a] <= tol) out.push_back(ActionId{static_cast<std::uint32_t>(a)});
  return out;
}

ActionId t_policy_select(StateId s, const TransitionValueTable& table, const Counters& counters,
                         const PolicyConfig& cfg, RngStream& rng, std::size_t num_actions) {
  if (rng.uniform01() < cfg.epsilon) return uniform_action(num_actions, rng);
  thread_local std::vector<double> scores;
  if (!t_action_scores(counters, table, s, cfg.kappa, scores)) return uniform_action(num_actions, rng);
  return pick_argmax(scores, rng);
}

std::vector<ActionId> t_policy_greedy_set(StateId s, const TransitionValueTable& table, const Counters& counters,
                                          double kappa, std::size_t num_actions) {
  std::vector<double> scores;
  if (!t_action_scores(counters, table, s, kappa, scores)) return all_actions(num_actions);
  return argmax_set(scores);
}

ActionId q_epsilon_greedy(StateId s, const QTable& q, double epsilon, RngStream& rng) {
  if (rng.uniform01() < epsilon) return uniform_action(q.num_actions(), rng);
  return pick_argmax(q.row(s), rng);
}

std::vector<ActionId> q_greedy_set(StateId s, const QTable& q) { return argmax_set(q.row(s)); }

ActionId v_model_policy(StateId s, const VTable& v, const Counters& counters, const RewardModel& model,
                        double gamma, const PolicyConfig& cfg, RngStream& rng) {
  if (rng.uniform01() < cfg.epsilon) return uniform_action(counters.num_actions(), rng);
  thread_local std::vector<double> scores;
  if (!v_action_scores(counters, model, v, s, gamma, cfg.kappa, scores))
    return uniform_action(counters.num_actions(), rng);
  return pick_argmax(scores, rng);
}

std::vector<ActionId> v_model_greedy_set(StateId s, const VTable& v, const Counters& counters,
                                         const RewardModel& model, double gamma, double kappa) {
  std::vector<double> scores;
  if (!v_action_scores(counters, model, v, s, gamma, kappa, scores)) return all_actions(counters.num_actions());
  return argmax_set(scores);
}

}  // namespace tlearn
