#pragma once

#include <string>
#include <string_view>

#include "tlearn/experiments.hpp"
#include "tlearn/text_format.hpp"

namespace tlearn {

// Experiment config in the MDP file dialect. Every key is optional and
// defaults to the ExperimentConfig value.
//
//   [experiment]
//   id = beam_headline
//   algorithm = t_learning      # t_learning | q_learning | td0_model | onpolicy_t
//   trials = 50
//   seed = 7
//   window = 50
//   eval_every = 10
//   max_episodes = 1000000
//   max_steps = 5000000
//   trace_states = 2 3 16
//
//   [environment]
//   kind = beam                 # small | beam | file
//   n = 50
//   beam_hops = 6
//   reward_easy = 1.0
//   reward_skill = 2
//   skill_success_prob = 1
//   skill_action = true
//   mdp_file = path/to/env.mdp  # kind = file only
//
//   [learner]
//   alpha = 0.5
//   gamma = 0.85
//   init_value = 0
//   alpha_schedule = constant   # constant | harmonic
//
//   [policy]
//   epsilon = 0.1
//   kappa = 0.75
//
// Unknown sections and keys are errors.

/// Applies the file's settings on top of `base`. Throws ParseError.
ExperimentConfig load_experiment_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_experiment_config_file(const std::string& path, ExperimentConfig base = {});

/// Writes every field, so the output reloads to an identical config.
std::string serialize_experiment_config(const ExperimentConfig& cfg);

}  // namespace tlearn
