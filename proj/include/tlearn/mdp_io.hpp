#pragma once

#include <string>
#include <string_view>

#include "tlearn/mdp.hpp"
#include "tlearn/text_format.hpp"

namespace tlearn {

// MDP text format, all indices 1-based:
//
//   [meta]
//   name = small_skill_n1
//   num_states = 6
//   num_actions = 3
//   start = 1
//   terminals = 4 5 6
//
//   [rewards]
//   2 4 1.1            # from to value; unlisted edges get 0
//
//   [kernel]
//   1 3 : 2 0.5 3 0.5  # state action : successor prob ...
//   3 * : 5 0.5 6 0.5  # '*' covers every action not listed for the state
//
// Parsing is separate from validation: a row summing to 1.1 loads fine and is
// reported by validate().

/// Throws ParseError with the line and field of the first problem.
Mdp load_mdp(std::string_view text);
std::string serialize_mdp(const Mdp& mdp);

Mdp load_mdp_file(const std::string& path);

}  // namespace tlearn
