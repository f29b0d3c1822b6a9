#include "tlearn/experiment_file.hpp"

#include <fstream>
#include <sstream>

namespace tlearn {

namespace {

bool parse_bool(const std::string& value, std::size_t line, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError(line, key, "expected true or false, got '" + value + "'");
}

std::size_t parse_count(const std::string& value, std::size_t line, const std::string& key) {
  return static_cast<std::size_t>(parse_uint(value, line, key));
}

void apply_experiment(ExperimentConfig& cfg, const std::string& key, const std::string& value, std::size_t line) {
  if (key == "id") {
    cfg.experiment_id = value;
  } else if (key == "algorithm") {
    auto algo = parse_algorithm(value);
    if (!algo) throw ParseError(line, key, "unknown algorithm '" + value + "'");
    cfg.algorithm = *algo;
  } else if (key == "trials") {
    cfg.trials = parse_count(value, line, key);
  } else if (key == "seed") {
    cfg.master_seed = parse_uint(value, line, key);
  } else if (key == "window") {
    cfg.convergence_window = parse_count(value, line, key);
  } else if (key == "eval_every") {
    cfg.eval_every = parse_count(value, line, key);
  } else if (key == "max_episodes") {
    cfg.max_episodes = parse_count(value, line, key);
  } else if (key == "max_steps") {
    cfg.max_total_steps = parse_uint(value, line, key);
  } else if (key == "max_episode_steps") {
    cfg.max_episode_steps = parse_count(value, line, key);
  } else if (key == "trace_states") {
    cfg.trace_states.clear();
    for (const auto& tok : split_whitespace(value)) {
      auto s = parse_uint(tok, line, key);
      if (s == 0) throw ParseError(line, key, "states are 1-based");
      cfg.trace_states.push_back(static_cast<std::uint32_t>(s));
    }
  } else {
    throw ParseError(line, key, "unknown key in [experiment]");
  }
}

void apply_environment(ExperimentConfig& cfg, const std::string& key, const std::string& value, std::size_t line) {
  auto& p = cfg.env.params;
  if (key == "kind") {
    if (value == "small") {
      cfg.env.kind = EnvKind::Small;
    } else if (value == "beam") {
      cfg.env.kind = EnvKind::Beam;
    } else if (value == "file") {
      cfg.env.kind = EnvKind::File;
    } else {
      throw ParseError(line, key, "expected small, beam or file, got '" + value + "'");
    }
  } else if (key == "n") {
    p.n = parse_count(value, line, key);
  } else if (key == "beam_hops") {
    p.beam_hops = parse_count(value, line, key);
  } else if (key == "reward_easy") {
    p.reward_easy = parse_double(value, line, key);
  } else if (key == "reward_skill") {
    p.reward_skill = parse_double(value, line, key);
  } else if (key == "skill_success_prob") {
    p.skill_success_prob = parse_double(value, line, key);
  } else if (key == "skill_action") {
    p.include_skill_action = parse_bool(value, line, key);
  } else if (key == "mdp_file") {
    cfg.env.mdp_path = value;
  } else {
    throw ParseError(line, key, "unknown key in [environment]");
  }
}

void apply_learner(ExperimentConfig& cfg, const std::string& key, const std::string& value, std::size_t line) {
  if (key == "alpha") {
    cfg.learner.alpha = parse_double(value, line, key);
  } else if (key == "gamma") {
    cfg.learner.gamma = parse_double(value, line, key);
  } else if (key == "init_value") {
    cfg.learner.init_value = parse_double(value, line, key);
  } else if (key == "alpha_schedule") {
    if (value == "constant") {
      cfg.learner.schedule = AlphaSchedule::Constant;
    } else if (value == "harmonic") {
      cfg.learner.schedule = AlphaSchedule::Harmonic;
    } else {
      throw ParseError(line, key, "expected constant or harmonic, got '" + value + "'");
    }
  } else {
    throw ParseError(line, key, "unknown key in [learner]");
  }
}

void apply_policy(ExperimentConfig& cfg, const std::string& key, const std::string& value, std::size_t line) {
  if (key == "epsilon") {
    cfg.policy.epsilon = parse_double(value, line, key);
  } else if (key == "kappa") {
    cfg.policy.kappa = parse_double(value, line, key);
  } else {
    throw ParseError(line, key, "unknown key in [policy]");
  }
}

}  // namespace

ExperimentConfig load_experiment_config(std::string_view text, ExperimentConfig base) {
  ExperimentConfig cfg = std::move(base);
  for (const auto& section : parse_sections(text)) {
    void (*apply)(ExperimentConfig&, const std::string&, const std::string&, std::size_t) = nullptr;
    if (section.name == "experiment") {
      apply = apply_experiment;
    } else if (section.name == "environment") {
      apply = apply_environment;
    } else if (section.name == "learner") {
      apply = apply_learner;
    } else if (section.name == "policy") {
      apply = apply_policy;
    } else {
      throw ParseError(section.line_no, section.name, "unknown section");
    }
    bool explicit_n = false;
    for (const auto& line : section.lines) {
      auto kv = parse_key_value(line);
      apply(cfg, kv.key, kv.value, line.line_no);
      if (apply == apply_environment && kv.key == "n") explicit_n = true;
      // Switching to the small MDP without an n picks its own default.
      if (apply == apply_environment && kv.key == "kind" && kv.value == "small" && !explicit_n)
        cfg.env.params.n = SkillEnvParams{}.n;
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_experiment_config(buf.str(), std::move(base));
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  if (!cfg.experiment_id.empty()) out << "id = " << cfg.experiment_id << '\n';
  out << "algorithm = " << to_string(cfg.algorithm) << '\n'
      << "trials = " << cfg.trials << '\n'
      << "seed = " << cfg.master_seed << '\n'
      << "window = " << cfg.convergence_window << '\n'
      << "eval_every = " << cfg.eval_every << '\n'
      << "max_episodes = " << cfg.max_episodes << '\n'
      << "max_steps = " << cfg.max_total_steps << '\n'
      << "max_episode_steps = " << cfg.max_episode_steps << '\n';
  if (!cfg.trace_states.empty()) {
    out << "trace_states =";
    for (auto s : cfg.trace_states) out << ' ' << s;
    out << '\n';
  }
  const auto& p = cfg.env.params;
  out << "\n[environment]\n";
  switch (cfg.env.kind) {
    case EnvKind::Small: out << "kind = small\n"; break;
    case EnvKind::Beam: out << "kind = beam\n"; break;
    case EnvKind::File: out << "kind = file\n"; break;
  }
  out << "n = " << p.n << '\n' << "beam_hops = " << p.beam_hops << '\n';
  if (p.reward_easy) out << "reward_easy = " << format_double(*p.reward_easy) << '\n';
  out << "reward_skill = " << format_double(p.reward_skill) << '\n'
      << "skill_success_prob = " << format_double(p.skill_success_prob) << '\n'
      << "skill_action = " << (p.include_skill_action ? "true" : "false") << '\n';
  if (!cfg.env.mdp_path.empty()) out << "mdp_file = " << cfg.env.mdp_path << '\n';
  out << "\n[learner]\n"
      << "alpha = " << format_double(cfg.learner.alpha) << '\n'
      << "gamma = " << format_double(cfg.learner.gamma) << '\n'
      << "init_value = " << format_double(cfg.learner.init_value) << '\n'
      << "alpha_schedule = " << (cfg.learner.schedule == AlphaSchedule::Harmonic ? "harmonic" : "constant") << '\n'
      << "\n[policy]\n"
      << "epsilon = " << format_double(cfg.policy.epsilon) << '\n'
      << "kappa = " << format_double(cfg.policy.kappa) << '\n';
  return out.str();
}

}  // namespace tlearn
