#include "tlearn/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tlearn {

Mdp::Mdp(std::string name, std::size_t num_states, std::size_t num_actions, StateId start)
    : name_(std::move(name)),
      num_states_(num_states),
      num_actions_(num_actions),
      start_(start),
      terminals_(num_states),
      kernel_(num_states * num_actions),
      rewards_(num_states),
      successors_(num_states) {
  if (num_states == 0) throw std::invalid_argument("Mdp: num_states must be positive");
  if (num_actions == 0) throw std::invalid_argument("Mdp: num_actions must be positive");
}

std::size_t Mdp::row_index(StateId s, ActionId a) const {
  if (s.index >= num_states_) throw std::out_of_range("Mdp: state out of range");
  if (a.index >= num_actions_) throw std::out_of_range("Mdp: action out of range");
  return static_cast<std::size_t>(s.index) * num_actions_ + a.index;
}

std::vector<StateId> Mdp::terminals() const {
  std::vector<StateId> out;
  for (std::uint32_t i = 0; i < num_states_; ++i)
    if (terminals_.contains(StateId{i})) out.push_back(StateId{i});
  return out;
}

void Mdp::set_terminal(StateId s, bool terminal) {
  if (s.index >= num_states_) throw std::out_of_range("Mdp: terminal state out of range");
  if (terminal)
    terminals_.insert(s);
  else
    terminals_.erase(s);
}

void Mdp::set_row(StateId s, ActionId a, std::vector<Outcome> row) {
  auto& slot = kernel_[row_index(s, a)];
  std::sort(row.begin(), row.end(), [](const Outcome& x, const Outcome& y) { return x.next < y.next; });
  slot.clear();
  for (const auto& o : row) {
    if (o.next.index >= num_states_) throw std::out_of_range("Mdp: successor out of range");
    if (!slot.empty() && slot.back().next == o.next)
      slot.back().prob += o.prob;
    else
      slot.push_back(o);
  }
  rebuild_successors(s);
}

void Mdp::rebuild_successors(StateId s) {
  auto& succ = successors_[s.index];
  succ.clear();
  for (std::uint32_t a = 0; a < num_actions_; ++a)
    for (const auto& o : kernel_[row_index(s, ActionId{a})])
      if (o.prob > 0.0) succ.push_back(o.next);
  std::sort(succ.begin(), succ.end());
  succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
}

void Mdp::set_reward(StateId s, StateId s_next, double value) {
  if (s.index >= num_states_ || s_next.index >= num_states_)
    throw std::out_of_range("Mdp: reward edge out of range");
  auto& row = rewards_[s.index];
  auto it = std::lower_bound(row.begin(), row.end(), s_next,
                             [](const auto& e, StateId key) { return e.first < key; });
  if (it != row.end() && it->first == s_next)
    it->second = value;
  else
    row.insert(it, {s_next, value});
}

void Mdp::clear_reward(StateId s, StateId s_next) {
  if (s.index >= num_states_) return;
  auto& row = rewards_[s.index];
  std::erase_if(row, [&](const auto& e) { return e.first == s_next; });
}

std::span<const Outcome> Mdp::row(StateId s, ActionId a) const { return kernel_[row_index(s, a)]; }

double Mdp::probability(StateId s, ActionId a, StateId s_next) const {
  for (const auto& o : row(s, a))
    if (o.next == s_next) return o.prob;
  return 0.0;
}

std::optional<double> Mdp::arrival_reward(StateId s, StateId s_next) const {
  if (s.index >= num_states_) return std::nullopt;
  const auto& row = rewards_[s.index];
  auto it = std::lower_bound(row.begin(), row.end(), s_next,
                             [](const auto& e, StateId key) { return e.first < key; });
  if (it != row.end() && it->first == s_next) return it->second;
  return std::nullopt;
}

double Mdp::reward(StateId s, StateId s_next) const {
  auto r = arrival_reward(s, s_next);
  if (!r) {
    std::ostringstream msg;
    msg << "reward undefined on edge (" << label(s) << "," << label(s_next) << ")";
    throw std::out_of_range(msg.str());
  }
  return *r;
}

std::vector<std::pair<std::pair<StateId, StateId>, double>> Mdp::rewards() const {
  std::vector<std::pair<std::pair<StateId, StateId>, double>> out;
  for (std::uint32_t s = 0; s < num_states_; ++s)
    for (const auto& [next, value] : rewards_[s]) out.push_back({{StateId{s}, next}, value});
  return out;
}

std::span<const StateId> Mdp::successors(StateId s) const { return successors_.at(s.index); }

bool operator==(const Mdp& a, const Mdp& b) {
  return a.name_ == b.name_ && a.num_states_ == b.num_states_ && a.num_actions_ == b.num_actions_ &&
         a.start_ == b.start_ && a.terminals_ == b.terminals_ && a.kernel_ == b.kernel_ &&
         a.rewards_ == b.rewards_;
}

std::vector<std::string> validate(const Mdp& mdp) {
  std::vector<std::string> issues;
  auto fmt = [](double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
  };
  if (mdp.start().index >= mdp.num_states()) issues.push_back("start state out of range");
  for (std::uint32_t si = 0; si < mdp.num_states(); ++si) {
    const StateId s{si};
    if (mdp.is_terminal(s)) continue;
    for (std::uint32_t ai = 0; ai < mdp.num_actions(); ++ai) {
      const ActionId a{ai};
      const auto row = mdp.row(s, a);
      const std::string where = "(s=" + std::to_string(label(s)) + ",a=" + std::to_string(label(a)) + ")";
      if (row.empty()) {
        issues.push_back("row " + where + " is empty");
        continue;
      }
      double sum = 0.0;
      for (const auto& o : row) {
        sum += o.prob;
        if (!(o.prob >= 0.0 && o.prob <= 1.0))
          issues.push_back("row " + where + " has probability " + fmt(o.prob) + " outside [0,1]");
        if (o.prob > 0.0 && !mdp.arrival_reward(s, o.next))
          issues.push_back("reward undefined on edge (" + std::to_string(label(s)) + "," +
                           std::to_string(label(o.next)) + ")");
      }
      if (std::abs(sum - 1.0) > 1e-12) issues.push_back("row " + where + " sums to " + fmt(sum));
    }
  }
  // One message per undefined edge even when several actions share it.
  std::sort(issues.begin(), issues.end());
  issues.erase(std::unique(issues.begin(), issues.end()), issues.end());
  return issues;
}

SampledTransition sample_transition(const Mdp& mdp, StateId s, ActionId a, RngStream& rng) {
  if (s.index >= mdp.num_states()) throw std::invalid_argument("sample_transition: state out of range");
  if (a.index >= mdp.num_actions()) throw std::invalid_argument("sample_transition: action out of range");
  if (mdp.is_terminal(s))
    throw std::invalid_argument("sample_transition: state " + std::to_string(label(s)) + " is terminal");
  const auto row = mdp.row(s, a);
  const double u = rng.uniform01();
  double acc = 0.0;
  const Outcome* pick = nullptr;
  for (const auto& o : row) {
    if (o.prob <= 0.0) continue;
    pick = &o;
    acc += o.prob;
    if (u < acc) break;
  }
  if (pick == nullptr) throw std::invalid_argument("sample_transition: empty kernel row");
  return {pick->next, mdp.reward(s, pick->next)};
}

EpisodeTrace run_episode(const Mdp& mdp, EpisodeAgent& agent, RngStream& rng, std::size_t max_steps) {
  if (max_steps == 0) throw std::invalid_argument("run_episode: max_steps must be at least 1");
  EpisodeTrace trace;
  StateId s = mdp.start();
  while (!mdp.is_terminal(s)) {
    if (trace.steps.size() >= max_steps) {
      trace.truncated = true;
      break;
    }
    const ActionId a = agent.select_action(s, rng);
    const auto [next, r] = sample_transition(mdp, s, a, rng);
    const StepRecord rec{s, a, next, r};
    trace.steps.push_back(rec);
    agent.learn(rec);
    s = next;
  }
  return trace;
}

}  // namespace tlearn
