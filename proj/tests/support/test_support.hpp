#pragma once

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <map>
#include <utility>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "tlearn/environments.hpp"
#include "tlearn/experiments.hpp"
#include "tlearn/mdp.hpp"
#include "tlearn/oracle.hpp"
#include "tlearn/rng.hpp"

namespace testing {

using namespace tlearn;

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("tlearn_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline StateId S(std::uint32_t one_based) { return state_label(one_based); }
inline ActionId A(std::uint32_t one_based) { return action_label(one_based); }

inline Mdp small_mdp(std::size_t n = 5) {
  SkillEnvParams p;
  p.n = n;
  return build_small_skill_mdp(p);
}

inline Mdp beam_mdp(std::size_t n = 50) {
  SkillEnvParams p = beam_defaults();
  p.n = n;
  return build_balance_beam(p);
}

/// Row-normalised random kernel sums can miss 1 by an ulp; renormalise the
/// last entry so validate() passes exactly.
inline void fix_row_sums(Mdp& mdp) {
  for (std::uint32_t s = 0; s < mdp.num_states(); ++s) {
    if (mdp.is_terminal(StateId{s})) continue;
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a) {
      std::vector<Outcome> row(mdp.row(StateId{s}, ActionId{a}).begin(), mdp.row(StateId{s}, ActionId{a}).end());
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < row.size(); ++i) head += row[i].prob;
      row.back().prob = 1.0 - head;
      mdp.set_row(StateId{s}, ActionId{a}, std::move(row));
    }
  }
}

/// Random episodic MDP: non-terminal states only move to strictly higher
/// indices, so every policy terminates. Rewards are non-negative.
inline Mdp random_dag_mdp(RngStream& rng, std::size_t num_states, std::size_t num_actions) {
  Mdp mdp("random", num_states, num_actions, StateId{0});
  const std::size_t terminals = 1 + rng.uniform_index(2);
  for (std::size_t t = num_states - terminals; t < num_states; ++t) mdp.set_terminal(StateId{static_cast<std::uint32_t>(t)});
  for (std::uint32_t s = 0; s + terminals < num_states; ++s) {
    const std::size_t options = num_states - s - 1;
    for (std::uint32_t a = 0; a < num_actions; ++a) {
      const std::size_t support = 1 + rng.uniform_index(std::min<std::size_t>(3, options));
      std::vector<Outcome> row;
      double total = 0.0;
      for (std::size_t k = 0; k < support; ++k) {
        const auto next = static_cast<std::uint32_t>(s + 1 + rng.uniform_index(options));
        const double w = 0.1 + rng.uniform01();
        row.push_back({StateId{next}, w});
        total += w;
      }
      for (auto& o : row) o.prob /= total;
      mdp.set_row(StateId{s}, ActionId{a}, std::move(row));
    }
    for (auto next : std::vector<StateId>(mdp.successors(StateId{s}).begin(), mdp.successors(StateId{s}).end()))
      mdp.set_reward(StateId{s}, next, std::round(rng.uniform01() * 20.0) / 10.0);
  }
  fix_row_sums(mdp);
  return mdp;
}

/// V^pi by a direct linear solve of (I - gamma P_pi) V = r_pi.
inline std::vector<double> direct_v_pi(const Mdp& mdp, const PolicyFn& pi, double gamma) {
  const auto n = static_cast<Eigen::Index>(mdp.num_states());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (std::uint32_t s = 0; s < mdp.num_states(); ++s) {
    const StateId sid{s};
    if (mdp.is_terminal(sid)) continue;
    const auto probs = pi(sid);
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a)
      for (const auto& o : mdp.row(sid, ActionId{a})) {
        const double w = probs[a] * o.prob;
        r(s) += w * mdp.reward(sid, o.next);
        if (!mdp.is_terminal(o.next)) m(s, o.next.index) -= gamma * w;
      }
  }
  const Eigen::VectorXd v = m.fullPivLu().solve(r);
  return std::vector<double>(v.data(), v.data() + n);
}

/// T^pi on every graph edge by a direct linear solve of
/// T(s,s') = R(s,s') + gamma sum_a pi(s',a) sum_s'' P(s''|s',a) T(s',s'').
inline std::map<std::pair<std::uint32_t, std::uint32_t>, double> direct_t_pi(const Mdp& mdp, const PolicyFn& pi,
                                                                              double gamma) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, Eigen::Index> index;
  for (std::uint32_t s = 0; s < mdp.num_states(); ++s)
    if (!mdp.is_terminal(StateId{s}))
      for (auto next : mdp.successors(StateId{s})) index.emplace(std::pair{s, next.index}, 0);
  Eigen::Index k = 0;
  for (auto& [edge, i] : index) i = k++;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd r(k);
  for (const auto& [edge, i] : index) {
    const StateId s{edge.first}, s1{edge.second};
    r(i) = mdp.reward(s, s1);
    if (mdp.is_terminal(s1)) continue;
    const auto probs = pi(s1);
    for (std::uint32_t a = 0; a < mdp.num_actions(); ++a)
      for (const auto& o : mdp.row(s1, ActionId{a})) m(i, index.at({s1.index, o.next.index})) -= gamma * probs[a] * o.prob;
  }
  const Eigen::VectorXd t = m.fullPivLu().solve(r);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> out;
  for (const auto& [edge, i] : index) out[edge] = t(i);
  return out;
}

}  // namespace testing
