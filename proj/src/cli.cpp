#include "tlearn/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlearn/experiment_file.hpp"
#include "tlearn/experiments.hpp"
#include "tlearn/export.hpp"
#include "tlearn/mdp_io.hpp"
#include "tlearn/oracle.hpp"
#include "tlearn/text_format.hpp"

namespace tlearn {

namespace {

using nlohmann::json;

// Raw flag values. Which of them override the config file is decided by
// CLI11's per-option counts.
struct EnvFlags {
  std::string env = "beam";
  std::string mdp_file;
  std::size_t n = 50;
  std::size_t beam_hops = 6;
  double reward_easy = 1.0;
  double reward_skill = 2.0;
  double skill_prob = 1.0;
  bool no_skill_action = false;
};

struct Options {
  EnvFlags env;
  std::string algo = "t_learning";
  double alpha = 0.5;
  double gamma = 0.85;
  double epsilon = 0.1;
  double kappa = 0.75;
  double init_value = 0.0;
  std::string alpha_schedule = "constant";
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::size_t window = 50;
  std::size_t eval_every = 10;
  std::size_t max_episodes = 1'000'000;
  std::uint64_t max_steps = 5'000'000;
  std::size_t jobs = 0;
  std::string id;
  std::string config;
  std::string out;
  std::string trace_out;
  std::string format;
  double tol = kDefaultSolverTol;
  double epsilon_env = 0.1;
  std::vector<std::size_t> n_list{2, 4, 8, 16, 32, 64};
  std::string study = "ratio";
  double optimistic_value = 2.0;
};

bool given(const CLI::App& app, const std::string& name) {
  const auto* opt = app.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

void add_env_flags(CLI::App& app, Options& o) {
  app.add_option("--env", o.env.env, "Environment: small, beam or file")
      ->check(CLI::IsMember({"small", "beam", "file"}))
      ->capture_default_str();
  app.add_option("--mdp-file", o.env.mdp_file, "MDP text file (implies --env file)");
  app.add_option("--n", o.env.n, "Actions per group; 2n+1 actions in total (default 50 beam, 5 small)");
  app.add_option("--beam-hops", o.env.beam_hops, "Beam length in hops")->capture_default_str();
  app.add_option("--reward-easy", o.env.reward_easy, "Low-skill terminal reward (default 1.0 beam, 1.1 small)");
  app.add_option("--reward-skill", o.env.reward_skill, "High-skill terminal reward")->capture_default_str();
  app.add_option("--skill-prob", o.env.skill_prob, "Success probability of the skilled action a*")
      ->capture_default_str();
  app.add_flag("--no-skill-action", o.env.no_skill_action, "Remove the skilled action a*");
}

void add_gamma(CLI::App& app, Options& o) {
  app.add_option("--gamma", o.gamma, "Discount factor")->capture_default_str();
}

void add_format(CLI::App& app, Options& o, const std::string& fallback) {
  o.format = fallback;
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
}

void add_learning_flags(CLI::App& app, Options& o) {
  app.add_option("--config", o.config, "Experiment config file; explicit flags override it");
  app.add_option("--id", o.id, "Experiment id (default <env>_<algo>_a<actions>)");
  app.add_option("--alpha", o.alpha, "Learning rate")->capture_default_str();
  add_gamma(app, o);
  app.add_option("--epsilon", o.epsilon, "Exploration probability")->capture_default_str();
  app.add_option("--kappa", o.kappa, "Mass an untried action puts on the best successor")->capture_default_str();
  app.add_option("--init-value", o.init_value, "Initial table value")->capture_default_str();
  app.add_option("--alpha-schedule", o.alpha_schedule, "Step-size schedule")
      ->check(CLI::IsMember({"constant", "harmonic"}))
      ->capture_default_str();
  app.add_option("--trials", o.trials, "Independent trials")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--window", o.window, "Consecutive passing evaluations required")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--eval-every", o.eval_every, "Episodes between convergence evaluations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-episodes", o.max_episodes, "Episode cap per trial")->capture_default_str();
  app.add_option("--max-steps", o.max_steps, "Step cap per trial")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Worker threads (default: hardware concurrency)");
  app.add_option("--out", o.out, "Output file (default: $TLEARN_OUT_DIR/<id>.<ext>, else stdout)");
  add_format(app, o, "csv");
}

EnvSpec env_from_flags(const CLI::App& app, const Options& o, EnvSpec env) {
  const auto& f = o.env;
  if (given(app, "--env")) {
    env.kind = f.env == "small" ? EnvKind::Small : f.env == "beam" ? EnvKind::Beam : EnvKind::File;
    if (!given(app, "--n")) env.params.n = env.kind == EnvKind::Small ? SkillEnvParams{}.n : beam_defaults().n;
  }
  if (given(app, "--mdp-file")) {
    env.mdp_path = f.mdp_file;
    if (!given(app, "--env")) env.kind = EnvKind::File;
  }
  if (given(app, "--n")) env.params.n = f.n;
  if (given(app, "--beam-hops")) env.params.beam_hops = f.beam_hops;
  if (given(app, "--reward-easy")) env.params.reward_easy = f.reward_easy;
  if (given(app, "--reward-skill")) env.params.reward_skill = f.reward_skill;
  if (given(app, "--skill-prob")) env.params.skill_success_prob = f.skill_prob;
  if (given(app, "--no-skill-action")) env.params.include_skill_action = !f.no_skill_action;
  if (env.kind == EnvKind::File && env.mdp_path.empty()) throw std::invalid_argument("--env file needs --mdp-file");
  return env;
}

ExperimentConfig config_from_flags(const CLI::App& app, const Options& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = load_experiment_config_file(o.config);
  cfg.env = env_from_flags(app, o, cfg.env);
  if (given(app, "--id")) cfg.experiment_id = o.id;
  if (given(app, "--algo")) {
    auto algo = parse_algorithm(o.algo);
    if (!algo) throw std::invalid_argument("unknown algorithm '" + o.algo + "'");
    cfg.algorithm = *algo;
  }
  if (given(app, "--alpha")) cfg.learner.alpha = o.alpha;
  if (given(app, "--gamma")) cfg.learner.gamma = o.gamma;
  if (given(app, "--init-value")) cfg.learner.init_value = o.init_value;
  if (given(app, "--alpha-schedule"))
    cfg.learner.schedule = o.alpha_schedule == "harmonic" ? AlphaSchedule::Harmonic : AlphaSchedule::Constant;
  if (given(app, "--epsilon")) cfg.policy.epsilon = o.epsilon;
  if (given(app, "--kappa")) cfg.policy.kappa = o.kappa;
  if (given(app, "--trials")) cfg.trials = o.trials;
  if (given(app, "--seed")) cfg.master_seed = o.seed;
  if (given(app, "--window")) cfg.convergence_window = o.window;
  if (given(app, "--eval-every")) cfg.eval_every = o.eval_every;
  if (given(app, "--max-episodes")) cfg.max_episodes = o.max_episodes;
  if (given(app, "--max-steps")) cfg.max_total_steps = o.max_steps;
  cfg.validate();
  return cfg;
}

std::size_t job_count(const Options& o) {
  if (o.jobs > 0) return o.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Where data goes: an explicit path, $TLEARN_OUT_DIR/<stem>.<ext>, or the
/// output stream (empty result).
std::string resolve_out(const std::string& explicit_path, const std::string& stem, const std::string& ext) {
  if (!explicit_path.empty()) return explicit_path;
  const char* dir = std::getenv("TLEARN_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  return (std::filesystem::path(dir) / (stem + "." + ext)).string();
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::string actions_text(const std::vector<ActionId>& actions) {
  std::string s = "{";
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(label(actions[i]));
  }
  return s + "}";
}

json action_labels(const std::vector<ActionId>& actions) {
  json arr = json::array();
  for (auto a : actions) arr.push_back(label(a));
  return arr;
}

json state_labels(const std::vector<StateId>& states) {
  json arr = json::array();
  for (auto s : states) arr.push_back(label(s));
  return arr;
}

void summarize(const AggregateResult& agg, std::ostream& err) {
  err << agg.experiment_id << ": " << agg.converged_trials << "/" << agg.trials.size()
      << " trials converged, mean steps " << format_double(agg.mean_steps) << ", mean episodes "
      << format_double(agg.mean_episodes);
  if (agg.mean_t_episodes) err << ", mean T-convergence episode " << format_double(*agg.mean_t_episodes);
  err << '\n';
}

int cmd_run(const CLI::App& app, const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = config_from_flags(app, o);
  const auto agg = run_experiment(cfg, job_count(o));
  summarize(agg, err);
  const bool as_json = o.format == "json";
  const std::string path = resolve_out(o.out, agg.experiment_id, as_json ? "json" : "csv");
  const std::string body =
      as_json ? json_text(results_json(agg, false)) : results_csv(std::span<const AggregateResult>(&agg, 1));
  emit(path, body, out);
  if (!o.trace_out.empty()) {
    write_file_atomic(o.trace_out, as_json ? json_text(results_json(agg, true))
                                           : trace_csv(std::span<const AggregateResult>(&agg, 1)));
  }
  return agg.all_converged() ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const CLI::App& app, const Options& o, std::ostream& out, std::ostream& err) {
  auto cfg = config_from_flags(app, o);
  if (o.n_list.empty()) throw std::invalid_argument("--n-list must not be empty");
  const bool as_json = o.format == "json";
  bool converged = true;
  std::string body;
  std::string stem = cfg.experiment_id.empty() ? std::string("sweep") : cfg.experiment_id;
  if (o.study == "optimistic") {
    const auto cells = optimistic_study(cfg, o.n_list, o.optimistic_value, job_count(o));
    for (const auto& c : cells) {
      summarize(c.baseline, err);
      summarize(c.optimistic, err);
      converged = converged && c.baseline.all_converged() && c.optimistic.all_converged();
    }
    body = as_json ? json_text(optimistic_json(cells)) : optimistic_csv(cells);
    stem += "_optimistic";
  } else {
    const auto sweep = sweep_actions(cfg, o.n_list, job_count(o));
    for (const auto& c : sweep.cells) {
      summarize(c.t_learning, err);
      summarize(c.q_learning, err);
      converged = converged && c.t_learning.all_converged() && c.q_learning.all_converged();
    }
    err << "fitted ratio exponent per doubling: " << format_double(sweep.fitted_exponent) << '\n';
    body = as_json ? json_text(sweep_json(sweep)) : sweep_csv(sweep);
  }
  emit(resolve_out(o.out, stem, as_json ? "json" : "csv"), body, out);
  return converged ? kExitOk : kExitNotConverged;
}

Mdp env_mdp(const CLI::App& app, const Options& o, bool require_valid = true) {
  const EnvSpec spec = env_from_flags(app, o, EnvSpec{});
  // build_env rejects invalid files; validate wants to list the problems.
  if (!require_valid && spec.kind == EnvKind::File) return load_mdp_file(spec.mdp_path);
  return build_env(spec);
}

int cmd_oracle(const CLI::App& app, const Options& o, std::ostream& out) {
  const Mdp mdp = env_mdp(app, o);
  const auto sol = solve_oracle(mdp, o.gamma, SolverOptions{o.tol, kDefaultSolverMaxIterations});
  std::ostringstream text;
  if (o.format == "json") {
    json v = json::array(), q = json::array(), t = json::array(), opt = json::array(), tau = json::array();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      const StateId sid{static_cast<std::uint32_t>(s)};
      v.push_back(sol.v_star[s]);
      json row = json::array();
      for (auto value : sol.q_star.row(sid)) row.push_back(value);
      q.push_back(std::move(row));
      for (const auto& e : sol.t_sharp.row(sid))
        t.push_back({{"from", label(sid)}, {"to", label(e.next)}, {"value", e.value}});
      opt.push_back(action_labels(sol.optimal_actions[s]));
      tau.push_back(sol.tau[s] ? json(label(*sol.tau[s])) : json(nullptr));
    }
    text << json_text({{"mdp", mdp.name()},
                       {"gamma", sol.gamma},
                       {"v_star", v},
                       {"q_star", q},
                       {"t_sharp", t},
                       {"optimal_actions", opt},
                       {"tau", tau},
                       {"optimal_path_states", state_labels(sol.optimal_path_states)},
                       {"tau_path", state_labels(sol.tau_path)}});
  } else {
    text << "# " << mdp.name() << ", gamma " << format_double(sol.gamma) << "\n[v_star]\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) text << s + 1 << ' ' << format_double(sol.v_star[s]) << '\n';
    text << "\n[q_star]\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      const StateId sid{static_cast<std::uint32_t>(s)};
      if (mdp.is_terminal(sid)) continue;
      text << s + 1;
      for (auto value : sol.q_star.row(sid)) text << ' ' << format_double(value);
      text << '\n';
    }
    text << "\n[t_sharp]\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      const StateId sid{static_cast<std::uint32_t>(s)};
      for (const auto& e : sol.t_sharp.row(sid))
        text << s + 1 << ' ' << label(e.next) << ' ' << format_double(e.value) << '\n';
    }
    text << "\n[optimal_actions]\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
      if (!sol.optimal_actions[s].empty()) text << s + 1 << ' ' << actions_text(sol.optimal_actions[s]) << '\n';
    text << "\n[tau]\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
      if (sol.tau[s]) text << s + 1 << ' ' << label(*sol.tau[s]) << '\n';
  }
  emit(o.out, text.str(), out);
  return kExitOk;
}

int cmd_check_precision(const CLI::App& app, const Options& o, std::ostream& out) {
  const Mdp mdp = env_mdp(app, o);
  const auto report = precision_check(mdp, o.gamma, o.tol);
  std::ostringstream text;
  if (o.format == "json") {
    json states = json::array();
    for (const auto& st : report.per_state)
      states.push_back({{"state", label(st.s)},
                        {"t_greedy", action_labels(st.t_greedy)},
                        {"q_optimal", action_labels(st.q_optimal)},
                        {"agree", st.agree}});
    text << json_text({{"mdp", mdp.name()}, {"holds", report.holds}, {"states", states}});
  } else {
    text << "holds: " << (report.holds ? "true" : "false") << '\n';
    for (const auto& st : report.per_state)
      text << "state " << label(st.s) << ": t_greedy " << actions_text(st.t_greedy) << " q_optimal "
           << actions_text(st.q_optimal) << (st.agree ? " agree" : " DISAGREE") << '\n';
  }
  emit(o.out, text.str(), out);
  return kExitOk;
}

int cmd_check_env_class(const CLI::App& app, const Options& o, std::ostream& out) {
  const Mdp mdp = env_mdp(app, o);
  if (!(o.epsilon_env > 0.0 && o.epsilon_env < 0.5)) throw std::invalid_argument("--epsilon-env must be in (0, 0.5)");
  const auto report = env_class_check(mdp, o.gamma, o.epsilon_env);
  std::ostringstream text;
  if (o.format == "json") {
    json edges = json::array();
    for (const auto& e : report.edges)
      edges.push_back({{"state", label(e.s)},
                       {"target", label(e.target)},
                       {"mean_probability", e.mean_probability},
                       {"best_probability", e.best_probability},
                       {"best_action", label(e.best_action)},
                       {"condition1", e.condition1},
                       {"condition2", e.condition2}});
    text << json_text(
        {{"mdp", mdp.name()}, {"epsilon_env", report.epsilon_env}, {"holds", report.holds}, {"edges", edges}});
  } else {
    text << "holds: " << (report.holds ? "true" : "false") << '\n';
    for (const auto& e : report.edges)
      text << "edge " << label(e.s) << "->" << label(e.target) << ": mean " << format_double(e.mean_probability)
           << " best " << format_double(e.best_probability) << " (a" << label(e.best_action) << ") condition1 "
           << (e.condition1 ? "pass" : "fail") << " condition2 " << (e.condition2 ? "pass" : "fail") << '\n';
  }
  emit(o.out, text.str(), out);
  return kExitOk;
}

int cmd_export_env(const CLI::App& app, const Options& o, std::ostream& out) {
  emit(o.out, serialize_mdp(env_mdp(app, o)), out);
  return kExitOk;
}

int cmd_validate(const CLI::App& app, const Options& o, std::ostream& out) {
  if (!o.config.empty()) {
    ExperimentConfig cfg = load_experiment_config_file(o.config);
    cfg.validate();
    if (cfg.env.kind == EnvKind::File && !given(app, "--mdp-file")) {
      const auto problems = validate(load_mdp_file(cfg.env.mdp_path));
      if (!problems.empty()) throw std::invalid_argument(cfg.env.mdp_path + ": " + problems.front());
    }
  }
  const Mdp mdp = env_mdp(app, o, false);
  const auto problems = validate(mdp);
  if (o.format == "json") {
    out << json_text(json{{"mdp", mdp.name()}, {"valid", problems.empty()}, {"problems", problems}});
  } else if (problems.empty()) {
    out << mdp.name() << ": valid\n";
  } else {
    for (const auto& p : problems) out << mdp.name() << ": " << p << '\n';
  }
  return problems.empty() ? kExitOk : kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"T-learning experiments: environments, exact oracles, learners and batch runs", "tlearn"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run a multi-trial experiment and export per-trial results");
  add_env_flags(*run, o);
  add_learning_flags(*run, o);
  run->add_option("--algo", o.algo, "t_learning, q_learning, td0_model or onpolicy_t")
      ->check(CLI::IsMember({"t_learning", "q_learning", "td0_model", "onpolicy_t"}))
      ->capture_default_str();
  run->add_option("--trace-out", o.trace_out, "Per-episode visit counts of states 2, 3 and the last state");

  auto* sweep = app.add_subcommand("sweep", "Paired T-learning / Q-learning runs over action-space sizes");
  add_env_flags(*sweep, o);
  add_learning_flags(*sweep, o);
  sweep->add_option("--n-list", o.n_list, "Values of n to sweep")->delimiter(',')->capture_default_str();
  sweep->add_option("--study", o.study, "ratio: Q vs T; optimistic: Q from --optimistic-value vs Q from 0")
      ->check(CLI::IsMember({"ratio", "optimistic"}))
      ->capture_default_str();
  sweep->add_option("--optimistic-value", o.optimistic_value, "Initial Q value of the optimistic arm")
      ->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Print V*, Q*, T#, optimal actions and the tau map");
  auto* precision = app.add_subcommand("check-precision", "Report whether T#-greedy actions are Q*-optimal");
  auto* env_class = app.add_subcommand("check-env-class", "Check the skill-environment conditions on tau edges");
  for (auto* sub : {oracle, precision, env_class}) {
    add_env_flags(*sub, o);
    add_gamma(*sub, o);
    sub->add_option("--tol", o.tol, "Solver tolerance and tie tolerance")->capture_default_str();
    add_format(*sub, o, "text");
    sub->add_option("--out", o.out, "Output file (default stdout)");
  }
  env_class->add_option("--epsilon-env", o.epsilon_env, "Condition threshold in (0, 0.5)")->capture_default_str();

  auto* export_env = app.add_subcommand("export-env", "Write an environment in the MDP text format");
  add_env_flags(*export_env, o);
  export_env->add_option("--out", o.out, "Output file (default stdout)");

  auto* validate = app.add_subcommand("validate", "Validate an MDP file, a generated environment or a config");
  add_env_flags(*validate, o);
  validate->add_option("--config", o.config, "Experiment config file to check");
  add_format(*validate, o, "text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(*run, o, out, err);
    if (*sweep) return cmd_sweep(*sweep, o, out, err);
    if (*oracle) return cmd_oracle(*oracle, o, out);
    if (*precision) return cmd_check_precision(*precision, o, out);
    if (*env_class) return cmd_check_env_class(*env_class, o, out);
    if (*export_env) return cmd_export_env(*export_env, o, out);
    if (*validate) return cmd_validate(*validate, o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tlearn
