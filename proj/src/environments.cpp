#include "tlearn/environments.hpp"

#include <stdexcept>
#include <string>

namespace tlearn {

void SkillEnvParams::validate() const {
  if (n < 1) throw std::invalid_argument("SkillEnvParams: n must be at least 1");
  if (beam_hops < 1) throw std::invalid_argument("SkillEnvParams: beam_hops must be at least 1");
  if (!(skill_success_prob >= 0.0 && skill_success_prob <= 1.0))
    throw std::invalid_argument("SkillEnvParams: skill_success_prob must lie in [0,1]");
}

namespace {

std::size_t action_count(const SkillEnvParams& p) { return 2 * p.n + (p.include_skill_action ? 1 : 0); }

// a_1..a_n -> low, a_{n+1}..a_2n -> high, a* -> either with 1/2.
void wire_start_fan(Mdp& mdp, const SkillEnvParams& p, StateId start, StateId low, StateId high) {
  for (std::uint32_t a = 0; a < 2 * p.n; ++a)
    mdp.set_row(start, ActionId{a}, {{a < p.n ? low : high, 1.0}});
  if (p.include_skill_action)
    mdp.set_row(start, ActionId{static_cast<std::uint32_t>(2 * p.n)}, {{low, 0.5}, {high, 0.5}});
}

// Non-skill actions split 1/2 between advance and fall; a* advances with the
// configured reliability.
void wire_skill_step(Mdp& mdp, const SkillEnvParams& p, StateId from, StateId advance, StateId fall) {
  for (std::uint32_t a = 0; a < 2 * p.n; ++a) mdp.set_row(from, ActionId{a}, {{advance, 0.5}, {fall, 0.5}});
  if (p.include_skill_action) {
    const double q = p.skill_success_prob;
    std::vector<Outcome> row;
    if (q > 0.0) row.push_back({advance, q});
    if (q < 1.0) row.push_back({fall, 1.0 - q});
    mdp.set_row(from, ActionId{static_cast<std::uint32_t>(2 * p.n)}, std::move(row));
  }
}

void wire_all_actions(Mdp& mdp, StateId from, StateId to) {
  for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) mdp.set_row(from, ActionId{a}, {{to, 1.0}});
}

}  // namespace

Mdp build_small_skill_mdp(const SkillEnvParams& p) {
  p.validate();
  const std::string name = "small_skill_n" + std::to_string(p.n);
  Mdp mdp(name, 6, action_count(p), state_label(1));
  const auto s1 = state_label(1), s2 = state_label(2), s3 = state_label(3);
  const auto s4 = state_label(4), s5 = state_label(5), s6 = state_label(6);
  for (auto t : {s4, s5, s6}) mdp.set_terminal(t);

  wire_start_fan(mdp, p, s1, s2, s3);
  wire_all_actions(mdp, s2, s4);
  wire_skill_step(mdp, p, s3, s5, s6);

  mdp.set_reward(s1, s2, 0.0);
  mdp.set_reward(s1, s3, 0.0);
  mdp.set_reward(s2, s4, p.reward_easy.value_or(kSmallRewardEasy));
  mdp.set_reward(s3, s5, p.reward_skill);
  mdp.set_reward(s3, s6, 0.0);
  return mdp;
}

Mdp build_balance_beam(const SkillEnvParams& p) {
  p.validate();
  const std::size_t h = p.beam_hops;
  const std::size_t num_states = 2 * h + 4;
  const std::string name = "balance_beam_n" + std::to_string(p.n) + "_h" + std::to_string(h);
  Mdp mdp(name, num_states, action_count(p), state_label(1));

  const auto even = [](std::size_t k) { return state_label(static_cast<std::uint32_t>(2 + 2 * k)); };
  const auto odd = [](std::size_t k) { return state_label(static_cast<std::uint32_t>(3 + 2 * k)); };
  const StateId fall = state_label(static_cast<std::uint32_t>(num_states));
  const StateId easy_end = even(h), skill_end = odd(h);
  for (auto t : {easy_end, skill_end, fall}) mdp.set_terminal(t);

  wire_start_fan(mdp, p, state_label(1), even(0), odd(0));
  mdp.set_reward(state_label(1), even(0), 0.0);
  mdp.set_reward(state_label(1), odd(0), 0.0);

  const double easy = p.reward_easy.value_or(kBeamRewardEasy);
  for (std::size_t k = 0; k < h; ++k) {
    wire_all_actions(mdp, even(k), even(k + 1));
    mdp.set_reward(even(k), even(k + 1), k + 1 == h ? easy : 0.0);

    wire_skill_step(mdp, p, odd(k), odd(k + 1), fall);
    mdp.set_reward(odd(k), odd(k + 1), k + 1 == h ? p.reward_skill : 0.0);
    mdp.set_reward(odd(k), fall, 0.0);
  }
  return mdp;
}

}  // namespace tlearn
