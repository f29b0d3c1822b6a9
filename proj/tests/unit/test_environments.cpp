#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"

using namespace testing;

namespace {

// True when relabelling states by perm maps a onto b exactly (kernel,
// rewards, terminals and start); actions keep their indices.
bool same_under(const Mdp& a, const Mdp& b, const std::vector<std::uint32_t>& perm) {
  auto map = [&](StateId s) { return StateId{perm[s.index]}; };
  if (map(a.start()) != b.start()) return false;
  for (std::uint32_t s = 0; s < a.num_states(); ++s) {
    const StateId sa{s};
    if (a.is_terminal(sa) != b.is_terminal(map(sa))) return false;
    for (std::uint32_t act = 0; act < a.num_actions(); ++act) {
      const auto ra = a.row(sa, ActionId{act});
      if (ra.size() != b.row(map(sa), ActionId{act}).size()) return false;
      for (const auto& o : ra)
        if (b.probability(map(sa), ActionId{act}, map(o.next)) != o.prob) return false;
    }
    for (std::uint32_t t = 0; t < a.num_states(); ++t)
      if (a.arrival_reward(sa, StateId{t}) != b.arrival_reward(map(sa), map(StateId{t}))) return false;
  }
  return true;
}

bool isomorphic(const Mdp& a, const Mdp& b) {
  if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) return false;
  std::vector<std::uint32_t> perm(a.num_states());
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    if (same_under(a, b, perm)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST_SUITE("environments") {
  TEST_CASE("small MDP with n=5 has the documented shape") {
    const Mdp m = small_mdp(5);
    CHECK(m.num_states() == 6);
    CHECK(m.num_actions() == 11);
    CHECK(m.start() == S(1));
    CHECK(m.terminals() == std::vector<StateId>{S(4), S(5), S(6)});
    CHECK(validate(m).empty());
    for (std::uint32_t a = 1; a <= 5; ++a) CHECK(m.probability(S(1), A(a), S(2)) == 1.0);
    for (std::uint32_t a = 6; a <= 10; ++a) CHECK(m.probability(S(1), A(a), S(3)) == 1.0);
    for (std::uint32_t a = 1; a <= 11; ++a) CHECK(m.probability(S(2), A(a), S(4)) == 1.0);
    for (std::uint32_t a = 1; a <= 10; ++a) {
      CHECK(m.probability(S(3), A(a), S(5)) == 0.5);
      CHECK(m.probability(S(3), A(a), S(6)) == 0.5);
    }
  }

  TEST_CASE("a* from the start picks either branch evenly") {
    const Mdp m = small_mdp(5);
    const auto row = m.row(S(1), skill_action(m));
    REQUIRE(row.size() == 2);
    CHECK(row[0] == Outcome{S(2), 0.5});
    CHECK(row[1] == Outcome{S(3), 0.5});
  }

  TEST_CASE("skill_success_prob 0.6 sets the a* row at state 3") {
    SkillEnvParams p;
    p.skill_success_prob = 0.6;
    const Mdp m = build_small_skill_mdp(p);
    CHECK(m.probability(S(3), skill_action(m), S(5)) == 0.6);
    CHECK(m.probability(S(3), skill_action(m), S(6)) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(validate(m).empty());
  }

  TEST_CASE("small MDP rewards") {
    const Mdp m = small_mdp();
    CHECK(m.reward(S(2), S(4)) == 1.1);
    CHECK(m.reward(S(3), S(5)) == 2.0);
    CHECK(m.reward(S(3), S(6)) == 0.0);
    CHECK(m.reward(S(1), S(2)) == 0.0);
  }

  TEST_CASE("standard beam with n=50") {
    const Mdp m = beam_mdp(50);
    CHECK(m.num_states() == 16);
    CHECK(m.num_actions() == 101);
    CHECK(m.terminals() == std::vector<StateId>{S(14), S(15), S(16)});
    CHECK(validate(m).empty());
    const auto a1 = m.row(S(13), A(1));
    REQUIRE(a1.size() == 2);
    CHECK(a1[0] == Outcome{S(15), 0.5});
    CHECK(a1[1] == Outcome{S(16), 0.5});
    const auto star = m.row(S(13), skill_action(m));
    REQUIRE(star.size() == 1);
    CHECK(star[0] == Outcome{S(15), 1.0});
    CHECK(m.reward(S(12), S(14)) == 1.0);
    CHECK(m.reward(S(13), S(15)) == 2.0);
    CHECK(m.reward(S(13), S(16)) == 0.0);
  }

  TEST_CASE("beam chains") {
    const Mdp m = beam_mdp(3);
    for (std::uint32_t s = 2; s <= 12; s += 2)
      for (std::uint32_t a = 1; a <= 7; ++a) CHECK(m.probability(S(s), A(a), S(s + 2)) == 1.0);
    for (std::uint32_t s = 3; s <= 13; s += 2) {
      for (std::uint32_t a = 1; a <= 6; ++a) {
        CHECK(m.probability(S(s), A(a), S(s + 2)) == 0.5);
        CHECK(m.probability(S(s), A(a), S(16)) == 0.5);
      }
      CHECK(m.probability(S(s), A(7), S(s + 2)) == 1.0);
    }
  }

  TEST_CASE("beam_hops scales the chain lengths") {
    SkillEnvParams p;
    p.n = 2;
    p.beam_hops = 3;
    const Mdp m = build_balance_beam(p);
    CHECK(m.num_states() == 10);
    CHECK(m.terminals() == std::vector<StateId>{S(8), S(9), S(10)});
    CHECK(validate(m).empty());
  }

  TEST_CASE("one-hop beam is the small MDP up to relabelling") {
    SkillEnvParams p;
    p.n = 5;
    p.beam_hops = 1;
    p.reward_easy = 1.1;
    CHECK(isomorphic(build_balance_beam(p), build_small_skill_mdp(p)));
    p.reward_easy = 1.0;  // different easy reward breaks it
    SkillEnvParams q = p;
    q.reward_easy = 1.1;
    CHECK_FALSE(isomorphic(build_balance_beam(p), build_small_skill_mdp(q)));
  }

  TEST_CASE("removing a* leaves 2n actions") {
    SkillEnvParams p;
    p.include_skill_action = false;
    const Mdp m = build_small_skill_mdp(p);
    CHECK(m.num_actions() == 10);
    CHECK(validate(m).empty());
    SkillEnvParams b = beam_defaults();
    b.include_skill_action = false;
    CHECK(build_balance_beam(b).num_actions() == 100);
  }

  TEST_CASE("action count is 2n+1 and generators always validate") {
    for (std::size_t n : {1u, 2u, 7u, 64u})
      for (double q : {0.0, 0.3, 1.0}) {
        SkillEnvParams p;
        p.n = n;
        p.skill_success_prob = q;
        CHECK(build_small_skill_mdp(p).num_actions() == 2 * n + 1);
        CHECK(build_balance_beam(p).num_actions() == 2 * n + 1);
        CHECK(validate(build_small_skill_mdp(p)).empty());
        CHECK(validate(build_balance_beam(p)).empty());
      }
  }

  TEST_CASE("invalid parameters are rejected") {
    SkillEnvParams p;
    p.n = 0;
    CHECK_THROWS_AS(build_small_skill_mdp(p), std::invalid_argument);
    p = {};
    p.beam_hops = 0;
    CHECK_THROWS_AS(build_balance_beam(p), std::invalid_argument);
    p = {};
    p.skill_success_prob = 1.5;
    CHECK_THROWS_AS(build_balance_beam(p), std::invalid_argument);
    p.skill_success_prob = -0.1;
    CHECK_THROWS_AS(build_small_skill_mdp(p), std::invalid_argument);
  }
}
