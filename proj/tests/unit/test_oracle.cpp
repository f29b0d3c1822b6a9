#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

using namespace testing;

namespace {

constexpr double kGamma = 0.85;

SkillEnvParams small_params(double q = 1.0, bool skill = true) {
  SkillEnvParams p;
  p.skill_success_prob = q;
  p.include_skill_action = skill;
  return p;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("small MDP optimal values match the two-step hand computation") {
    const Mdp m = small_mdp(5);
    const auto vi = value_iteration(m, kGamma);
    // Two backups: gamma * 2 through state 3 and gamma * 1.1 through state 2.
    CHECK(std::abs(vi.q.get(S(1), A(6)) - kGamma * 2.0) < 1e-9);
    CHECK(std::abs(vi.q.get(S(1), A(1)) - kGamma * 1.1) < 1e-9);
    CHECK(std::abs(vi.q.get(S(3), A(11)) - 2.0) < 1e-9);
    CHECK(std::abs(vi.q.get(S(3), A(1)) - 1.0) < 1e-9);
    CHECK(std::abs(vi.q.get(S(1), A(11)) - (0.5 * 0.935 + 0.5 * 1.7)) < 1e-9);
    CHECK(vi.optimal_actions[0] == std::vector<ActionId>{A(6), A(7), A(8), A(9), A(10)});
    CHECK(vi.optimal_actions[2] == std::vector<ActionId>{A(11)});
    CHECK(vi.optimal_actions[3].empty());
    CHECK(vi.v[3] == 0.0);
    CHECK(vi.residual < 1e-10);
  }

  TEST_CASE("V* is the max of Q* at every non-terminal state") {
    const Mdp m = beam_mdp(5);
    const auto vi = value_iteration(m, kGamma);
    for (std::uint32_t s = 0; s < m.num_states(); ++s) {
      if (m.is_terminal(StateId{s})) {
        CHECK(vi.v[s] == 0.0);
        continue;
      }
      CHECK(std::abs(vi.v[s] - vi.q.max_value(StateId{s})) < 1e-12);
    }
  }

  TEST_CASE("T# on the small MDP") {
    const auto t = t_sharp(small_mdp(5), kGamma);
    CHECK(std::abs(t.get(S(3), S(5)) - 2.0) < 1e-9);
    CHECK(std::abs(t.get(S(2), S(4)) - 1.1) < 1e-9);
    CHECK(std::abs(t.get(S(1), S(3)) - 1.7) < 1e-9);
    CHECK(std::abs(t.get(S(1), S(2)) - 0.935) < 1e-9);
    CHECK(t.get(S(3), S(6)) == 0.0);
    CHECK(t.size() == 5);
  }

  TEST_CASE("T# on the beam discounts geometrically along each chain") {
    const Mdp m = beam_mdp(50);
    const auto t = t_sharp(m, kGamma);
    CHECK(std::abs(t.get(S(1), S(3)) - 2.0 * std::pow(kGamma, 6)) < 1e-9);
    CHECK(std::abs(t.get(S(1), S(2)) - std::pow(kGamma, 6)) < 1e-9);
    CHECK(t_sharp_residual(m, kGamma, t) < 1e-10);
  }

  TEST_CASE("T# exists exactly on graph edges and satisfies its relation identity") {
    const Mdp m = beam_mdp(3);
    const auto t = t_sharp(m, kGamma);
    for (std::uint32_t s = 0; s < m.num_states(); ++s) {
      const StateId sid{s};
      std::vector<StateId> keys = t.observed_successors(sid);
      std::vector<StateId> edges(m.successors(sid).begin(), m.successors(sid).end());
      if (m.is_terminal(sid)) edges.clear();
      CHECK(keys == edges);
      for (const auto& e : t.row(sid)) {
        double v_tilde = 0.0;
        if (!m.is_terminal(e.next)) v_tilde = *t.max_observed(e.next);
        CHECK(std::abs(e.value - (m.reward(sid, e.next) + kGamma * v_tilde)) < 1e-10);
      }
    }
  }

  TEST_CASE("removing a* leaves T# unchanged") {
    CHECK(t_sharp(build_small_skill_mdp(small_params()), kGamma) ==
          t_sharp(build_small_skill_mdp(small_params(1.0, false)), kGamma));
    SkillEnvParams b = beam_defaults();
    const auto with = t_sharp(build_balance_beam(b), kGamma);
    b.include_skill_action = false;
    CHECK(with == t_sharp(build_balance_beam(b), kGamma));
  }

  TEST_CASE("precision holds on both environments with a*") {
    CHECK(precision_check(small_mdp(5), kGamma).holds);
    CHECK(precision_check(beam_mdp(50), kGamma).holds);
  }

  TEST_CASE("precision fails at state 1 without a*") {
    const auto report = precision_check(build_small_skill_mdp(small_params(1.0, false)), kGamma);
    CHECK_FALSE(report.holds);
    REQUIRE(report.per_state.size() == 3);
    const auto& s1 = report.per_state[0];
    CHECK(s1.s == S(1));
    CHECK_FALSE(s1.agree);
    CHECK(s1.t_greedy == std::vector<ActionId>{A(6), A(7), A(8), A(9), A(10)});
    CHECK(s1.q_optimal == std::vector<ActionId>{A(1), A(2), A(3), A(4), A(5)});
    CHECK(report.per_state[1].agree);
    CHECK(report.per_state[2].agree);
  }

  TEST_CASE("precision flips across the 0.55 success threshold") {
    CHECK(precision_check(build_small_skill_mdp(small_params(0.6)), kGamma).holds);
    CHECK_FALSE(precision_check(build_small_skill_mdp(small_params(0.5)), kGamma).holds);
    // The exact threshold is 1.1 / 2 = 0.55; the oracle resolves either side.
    CHECK(precision_check(build_small_skill_mdp(small_params(0.551)), kGamma).holds);
    CHECK_FALSE(precision_check(build_small_skill_mdp(small_params(0.549)), kGamma).holds);
  }

  TEST_CASE("tau on the small MDP and the beam") {
    const auto tau = tau_map(small_mdp(5), kGamma);
    CHECK(tau[0] == S(3));
    CHECK(tau[1] == S(4));
    CHECK(tau[2] == S(5));
    CHECK_FALSE(tau[3].has_value());
    const Mdp b = beam_mdp(50);
    const auto bt = tau_map(b, kGamma);
    for (std::uint32_t s = 1; s <= 13; s += 2) CHECK(bt[s - 1] == S(s + 2));
    const auto sol = solve_oracle(b, kGamma);
    CHECK(sol.tau_path == std::vector<StateId>{S(1), S(3), S(5), S(7), S(9), S(11), S(13)});
    CHECK(sol.optimal_path_states == sol.tau_path);
  }

  TEST_CASE("tau of a single edge is its only neighbour") {
    Mdp m("edge", 2, 1, S(1));
    m.set_terminal(S(2));
    m.set_row(S(1), A(1), {{S(2), 1.0}});
    m.set_reward(S(1), S(2), 0.0);
    CHECK(tau_map(m, kGamma)[0] == S(2));
  }

  TEST_CASE("relaxed values let every edge be taken deterministically") {
    const auto v = relaxed_graph_values(build_small_skill_mdp(small_params(1.0, false)), kGamma);
    CHECK(std::abs(v[2] - 2.0) < 1e-9);
    CHECK(std::abs(v[0] - 1.7) < 1e-9);
  }

  TEST_CASE("environment class conditions on the beam") {
    const auto report = env_class_check(beam_mdp(50), kGamma, 0.1);
    CHECK(report.holds);
    CHECK(report.edges.size() == 13);
    for (const auto& e : report.edges) {
      CHECK(e.best_probability == 1.0);
      CHECK(e.condition1);
      CHECK(e.condition2);
    }
    CHECK(report.edges[0].mean_probability == doctest::Approx(0.5));
  }

  TEST_CASE("condition 2 fails at state 3 without a*") {
    const auto report = env_class_check(build_small_skill_mdp(small_params(1.0, false)), kGamma, 0.1);
    CHECK_FALSE(report.holds);
    bool found = false;
    for (const auto& e : report.edges)
      if (e.s == S(3)) {
        found = true;
        CHECK(e.best_probability == 0.5);
        CHECK_FALSE(e.condition2);
        CHECK(e.condition1);
      }
    CHECK(found);
  }

  TEST_CASE("deterministic chain passes trivially") {
    Mdp m("chain", 4, 2, S(1));
    m.set_terminal(S(4));
    for (std::uint32_t s = 1; s <= 3; ++s)
      for (std::uint32_t a = 1; a <= 2; ++a) m.set_row(S(s), A(a), {{S(s + 1), 1.0}});
    for (std::uint32_t s = 1; s <= 3; ++s) m.set_reward(S(s), S(s + 1), 1.0);
    const auto report = env_class_check(m, kGamma, 0.1);
    CHECK(report.holds);
    CHECK(report.edges.size() == 3);
  }

  TEST_CASE("policy evaluation matches the direct linear solve on the beam") {
    const Mdp m = beam_mdp(3);
    const auto pi = uniform_policy(m);
    const auto values = evaluate_policy(m, pi, kGamma);
    const auto v = direct_v_pi(m, pi, kGamma);
    for (std::size_t s = 0; s < v.size(); ++s) CHECK(std::abs(values.v[s] - v[s]) < 1e-9);
    for (const auto& [edge, value] : direct_t_pi(m, pi, kGamma))
      CHECK(std::abs(values.t.get(StateId{edge.first}, StateId{edge.second}) - value) < 1e-9);
  }

  TEST_CASE("evaluated V and T satisfy both relations") {
    const Mdp m = small_mdp(2);
    const auto pi = uniform_policy(m);
    const auto values = evaluate_policy(m, pi, kGamma);
    for (std::uint32_t s = 0; s < m.num_states(); ++s) {
      const StateId sid{s};
      if (m.is_terminal(sid)) continue;
      double expected = 0.0;
      const auto probs = pi(sid);
      for (std::uint32_t a = 0; a < m.num_actions(); ++a)
        for (const auto& o : m.row(sid, ActionId{a})) {
          expected += probs[a] * o.prob * values.t.get(sid, o.next);
          CHECK(std::abs(values.t.get(sid, o.next) - (m.reward(sid, o.next) + kGamma * values.v[o.next.index])) <
                1e-9);
        }
      CHECK(std::abs(values.v[s] - expected) < 1e-9);
    }
  }

  TEST_CASE("a non-terminating MDP with gamma near 1 hits the iteration cap") {
    Mdp m("loop", 2, 1, S(1));
    m.set_terminal(S(2));
    m.set_row(S(1), A(1), {{S(1), 0.999}, {S(2), 0.001}});
    m.set_reward(S(1), S(1), 1.0);
    m.set_reward(S(1), S(2), 0.0);
    SolverOptions opts;
    opts.max_iterations = 10;
    CHECK_THROWS_AS(value_iteration(m, 0.99, opts), SolverDivergence);
  }
}
