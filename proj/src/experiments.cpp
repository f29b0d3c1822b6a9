#include "tlearn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "tlearn/mdp_io.hpp"

namespace tlearn {

Mdp build_env(const EnvSpec& env) {
  switch (env.kind) {
    case EnvKind::Small: return build_small_skill_mdp(env.params);
    case EnvKind::Beam: return build_balance_beam(env.params);
    case EnvKind::File: {
      Mdp mdp = load_mdp_file(env.mdp_path);
      const auto problems = validate(mdp);
      if (!problems.empty()) throw std::invalid_argument(env.mdp_path + ": " + problems.front());
      return mdp;
    }
  }
  throw std::invalid_argument("build_env: unknown environment kind");
}

std::string env_label(const EnvSpec& env, const Mdp& mdp) {
  switch (env.kind) {
    case EnvKind::Small: return "small";
    case EnvKind::Beam: return "beam";
    case EnvKind::File: return mdp.name();
  }
  return mdp.name();
}

void ExperimentConfig::validate() const {
  learner.validate();
  policy.validate();
  if (env.kind != EnvKind::File) env.params.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (convergence_window < 1) throw std::invalid_argument("convergence window must be at least 1");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be at least 1");
  if (max_episodes < 1) throw std::invalid_argument("max_episodes must be at least 1");
  if (max_episode_steps < 1) throw std::invalid_argument("max_episode_steps must be at least 1");
}

namespace {

std::vector<StateId> resolve_trace_states(const ExperimentConfig& cfg, const Mdp& mdp) {
  std::vector<std::uint32_t> labels = cfg.trace_states;
  if (labels.empty()) {
    for (std::uint32_t l : {2u, 3u, static_cast<std::uint32_t>(mdp.num_states())})
      if (l <= mdp.num_states() && std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  }
  std::vector<StateId> out;
  for (auto l : labels) {
    if (l < 1 || l > mdp.num_states())
      throw std::invalid_argument("trace state " + std::to_string(l) + " outside the MDP");
    out.push_back(state_label(l));
  }
  return out;
}

std::string default_experiment_id(const std::string& env, Algorithm algo, std::size_t n_actions) {
  return env + "_" + std::string(to_string(algo)) + "_a" + std::to_string(n_actions);
}

bool is_subset(const std::vector<ActionId>& sub, const std::vector<ActionId>& super) {
  return std::all_of(sub.begin(), sub.end(),
                     [&](ActionId a) { return std::find(super.begin(), super.end(), a) != super.end(); });
}

struct Moments {
  double mean = 0.0;
  std::optional<double> std;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

// Argmax set over observed successors of s, values within tol tied.
std::vector<StateId> preferred_successors(const TransitionValueTable& table, StateId s, double tol) {
  std::vector<StateId> out;
  const auto best = table.max_observed(s);
  if (!best) return out;
  for (const auto& e : table.row(s))
    if (*best - e.value <= tol) out.push_back(e.next);
  return out;
}

}  // namespace

AggregateResult aggregate(std::string experiment_id, Algorithm algorithm, std::string env, std::size_t n_actions,
                          std::vector<TrialResult> trials) {
  AggregateResult agg;
  agg.experiment_id = std::move(experiment_id);
  agg.algorithm = algorithm;
  agg.env = std::move(env);
  agg.n_actions = n_actions;
  std::vector<double> steps, episodes, t_episodes;
  for (const auto& t : trials) {
    steps.push_back(static_cast<double>(t.steps_to_policy_convergence));
    episodes.push_back(static_cast<double>(t.episodes_to_policy_convergence));
    if (t.episodes_to_t_convergence) t_episodes.push_back(static_cast<double>(*t.episodes_to_t_convergence));
    if (t.converged) ++agg.converged_trials;
  }
  const auto ms = moments(steps), me = moments(episodes);
  agg.mean_steps = ms.mean;
  agg.std_steps = ms.std;
  agg.mean_episodes = me.mean;
  agg.std_episodes = me.std;
  if (!t_episodes.empty()) agg.mean_t_episodes = moments(t_episodes).mean;
  agg.trials = std::move(trials);
  return agg;
}

bool detect_policy_convergence(const LearningAgent& agent, const OracleSolution& oracle) {
  for (auto s : oracle.optimal_path_states)
    if (!is_subset(agent.greedy_set(s), oracle.optimal_actions[s.index])) return false;
  return true;
}

bool detect_t_convergence(const TransitionValueTable& table, const OracleSolution& oracle) {
  constexpr double kTol = 1e-12;
  if (oracle.tau_path.empty()) return false;
  for (auto s : oracle.tau_path) {
    const auto learned = preferred_successors(table, s, kTol);
    if (learned.empty() || learned != preferred_successors(oracle.t_sharp, s, kTol)) return false;
  }
  return true;
}

TrialResult run_trial(const ExperimentConfig& cfg, const Mdp& mdp, const OracleSolution& oracle,
                      std::size_t trial_index) {
  cfg.validate();
  RngStream rng = RngStream::for_trial(cfg.master_seed, trial_index);
  auto agent = make_agent(cfg.algorithm, mdp, cfg.learner, cfg.policy);

  TrialResult res;
  res.trial = trial_index;
  res.seed = rng.seed();
  res.visits.states = resolve_trace_states(cfg, mdp);
  const std::size_t slots = res.visits.states.size();
  const bool track_t = cfg.algorithm == Algorithm::TLearning;

  std::size_t streak = 0;
  std::uint64_t streak_steps = 0, streak_episodes = 0;
  while (res.total_episodes < cfg.max_episodes && res.total_steps < cfg.max_total_steps) {
    agent->begin_episode();
    const auto trace = run_episode(mdp, *agent, rng, cfg.max_episode_steps);
    ++res.total_episodes;
    res.total_steps += trace.steps.size();

    const std::size_t base = res.visits.counts.size();
    res.visits.counts.resize(base + slots, 0);
    for (const auto& rec : trace.steps)
      for (std::size_t k = 0; k < slots; ++k)
        if (rec.s_next == res.visits.states[k]) ++res.visits.counts[base + k];

    if (track_t && !res.episodes_to_t_convergence && detect_t_convergence(*agent->transition_values(), oracle))
      res.episodes_to_t_convergence = res.total_episodes;

    if (res.total_episodes % cfg.eval_every != 0) continue;
    if (!detect_policy_convergence(*agent, oracle)) {
      streak = 0;
      continue;
    }
    if (streak == 0) {
      streak_steps = res.total_steps;
      streak_episodes = res.total_episodes;
    }
    if (++streak >= cfg.convergence_window) {
      res.converged = true;
      break;
    }
  }
  if (res.converged) {
    res.steps_to_policy_convergence = streak_steps;
    res.episodes_to_policy_convergence = streak_episodes;
  } else {
    res.steps_to_policy_convergence = res.total_steps;
    res.episodes_to_policy_convergence = res.total_episodes;
  }
  return res;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  const Mdp mdp = build_env(cfg.env);
  const auto oracle = solve_oracle(mdp, cfg.learner.gamma);
  return run_trial(cfg, mdp, oracle, trial_index);
}

AggregateResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  cfg.validate();
  const Mdp mdp = build_env(cfg.env);
  const auto oracle = solve_oracle(mdp, cfg.learner.gamma);

  std::vector<TrialResult> results(cfg.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        results[i] = run_trial(cfg, mdp, oracle, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.trials;
        return;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, cfg.trials);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const std::string env = env_label(cfg.env, mdp);
  std::string id = cfg.experiment_id.empty() ? default_experiment_id(env, cfg.algorithm, mdp.num_actions())
                                             : cfg.experiment_id;
  return aggregate(std::move(id), cfg.algorithm, env, mdp.num_actions(), std::move(results));
}

namespace {

ExperimentConfig cell_config(const ExperimentConfig& base, std::size_t n, Algorithm algo, const std::string& tag) {
  if (base.env.kind == EnvKind::File) throw std::invalid_argument("action sweeps need a generated environment");
  ExperimentConfig cfg = base;
  cfg.env.params.n = n;
  cfg.algorithm = algo;
  cfg.experiment_id = (base.experiment_id.empty() ? std::string("sweep") : base.experiment_id) + "_" + tag + "_n" +
                      std::to_string(n);
  return cfg;
}

}  // namespace

SweepResult sweep_actions(const ExperimentConfig& base, std::span<const std::size_t> n_values, std::size_t jobs) {
  if (n_values.empty()) throw std::invalid_argument("sweep_actions: empty n list");
  SweepResult out;
  std::vector<double> xs, ys;
  for (auto n : n_values) {
    SweepCell cell;
    cell.n = n;
    cell.t_learning = run_experiment(cell_config(base, n, Algorithm::TLearning, "t_learning"), jobs);
    cell.q_learning = run_experiment(cell_config(base, n, Algorithm::QLearning, "q_learning"), jobs);
    cell.n_actions = cell.t_learning.n_actions;
    cell.ratio_episodes = cell.q_learning.mean_episodes / cell.t_learning.mean_episodes;
    cell.ratio_steps = cell.q_learning.mean_steps / cell.t_learning.mean_steps;
    xs.push_back(static_cast<double>(cell.n_actions));
    ys.push_back(cell.ratio_episodes);
    out.cells.push_back(std::move(cell));
  }
  out.fitted_exponent = xs.size() >= 2 ? fit_loglog_exponent(xs, ys) : 0.0;
  return out;
}

std::vector<OptimisticCell> optimistic_study(const ExperimentConfig& base, std::span<const std::size_t> n_values,
                                             double init_value, std::size_t jobs) {
  std::vector<OptimisticCell> out;
  for (auto n : n_values) {
    OptimisticCell cell;
    cell.n = n;
    cell.baseline = run_experiment(cell_config(base, n, Algorithm::QLearning, "q_baseline"), jobs);
    auto opt = cell_config(base, n, Algorithm::QLearning, "q_optimistic");
    opt.learner.init_value = init_value;
    cell.optimistic = run_experiment(opt, jobs);
    cell.n_actions = cell.baseline.n_actions;
    cell.ratio_episodes = cell.optimistic.mean_episodes / cell.baseline.mean_episodes;
    out.push_back(std::move(cell));
  }
  return out;
}

double fit_loglog_exponent(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog_exponent: need >= 2 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("fit_loglog_exponent: values must be positive");
    lx.push_back(std::log2(x[i]));
    ly.push_back(std::log2(y[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_exponent: x values must differ");
  return sxy / sxx;
}

std::optional<std::size_t> sustained_crossover(const VisitTrace& trace, StateId preferred, StateId other,
                                               std::size_t window) {
  if (window < 1) throw std::invalid_argument("sustained_crossover: window must be positive");
  const auto slot_of = [&](StateId s) {
    const auto it = std::find(trace.states.begin(), trace.states.end(), s);
    if (it == trace.states.end())
      throw std::invalid_argument("sustained_crossover: state " + std::to_string(label(s)) + " not traced");
    return static_cast<std::size_t>(it - trace.states.begin());
  };
  const std::size_t kp = slot_of(preferred), ko = slot_of(other);
  const std::size_t episodes = trace.episodes();
  // prefix[e] = sum over the first e episodes.
  std::vector<long long> pp(episodes + 1, 0), po(episodes + 1, 0);
  for (std::size_t e = 0; e < episodes; ++e) {
    pp[e + 1] = pp[e] + trace.count(e, kp);
    po[e + 1] = po[e] + trace.count(e, ko);
  }
  std::optional<std::size_t> start;
  for (std::size_t e = episodes; e >= 1; --e) {
    const std::size_t lo = e > window ? e - window : 0;
    if (pp[e] - pp[lo] <= po[e] - po[lo]) break;
    start = e;
  }
  return start;
}

}  // namespace tlearn
