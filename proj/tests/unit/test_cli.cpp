#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"
#include "tlearn/cli.hpp"
#include "tlearn/mdp_io.hpp"

using namespace testing;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tlearn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Clears TLEARN_OUT_DIR for the scope so results go where each test says.
struct ScopedOutDir {
  explicit ScopedOutDir(const std::string& dir = {}) {
    if (dir.empty()) {
      ::unsetenv("TLEARN_OUT_DIR");
    } else {
      ::setenv("TLEARN_OUT_DIR", dir.c_str(), 1);
    }
  }
  ~ScopedOutDir() { ::unsetenv("TLEARN_OUT_DIR"); }
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::vector<std::string> kQuickRun{"run", "--env", "small", "--n", "1", "--trials", "6", "--seed", "7"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
  base.insert(base.end(), extra);
  return base;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help documents the paper defaults") {
    ScopedOutDir scope;
    const auto top = cli({"--help"});
    CHECK(top.code == kExitOk);
    for (const char* sub : {"run", "sweep", "oracle", "check-precision", "check-env-class", "export-env", "validate"})
      CHECK(top.out.find(sub) != std::string::npos);
    const auto run = cli({"run", "--help"});
    CHECK(run.code == kExitOk);
    for (const char* flag : {"--alpha", "--gamma", "--epsilon", "--kappa", "--trials", "--jobs", "--out"})
      CHECK(run.out.find(flag) != std::string::npos);
    for (const char* value : {"0.5", "0.85", "0.1", "0.75", "50"}) CHECK(run.out.find(value) != std::string::npos);
  }

  TEST_CASE("misuse exits 1") {
    ScopedOutDir scope;
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"run", "--bogus"}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"run", "--algo", "sarsa"}).code == kExitUsage);
    CHECK(cli({"run", "--trials", "0"}).code == kExitUsage);
    CHECK(cli({"run", "--env", "maze"}).code == kExitUsage);
    const auto bad = cli({"run", "--alpha", "1.5", "--env", "small", "--n", "1", "--trials", "1"});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("error:") != std::string::npos);
  }

  TEST_CASE("check-precision without a* reports a failure but exits 0") {
    ScopedOutDir scope;
    const auto r = cli({"check-precision", "--env", "small", "--no-skill-action"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("holds: false\n", 0) == 0);
    CHECK(r.out.find("state 1:") != std::string::npos);
    CHECK(r.out.find("DISAGREE") != std::string::npos);

    const auto ok = cli({"check-precision", "--env", "small", "--format", "json"});
    CHECK(ok.code == kExitOk);
    CHECK(nlohmann::json::parse(ok.out).at("holds").get<bool>());

    const auto flip = cli({"check-precision", "--env", "small", "--skill-prob", "0.5", "--format", "json"});
    CHECK_FALSE(nlohmann::json::parse(flip.out).at("holds").get<bool>());
  }

  TEST_CASE("check-env-class reports the skill conditions") {
    ScopedOutDir scope;
    const auto r = cli({"check-env-class", "--env", "beam", "--n", "2", "--format", "json"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("holds").get<bool>());
    CHECK(j.at("epsilon_env").get<double>() == 0.1);
    CHECK_FALSE(j.at("edges").empty());

    const auto without = cli({"check-env-class", "--env", "small", "--no-skill-action"});
    CHECK(without.code == kExitOk);
    CHECK(without.out.rfind("holds: false\n", 0) == 0);
    CHECK(cli({"check-env-class", "--env", "small", "--epsilon-env", "0.7"}).code == kExitUsage);
  }

  TEST_CASE("oracle prints the hand-derived values") {
    ScopedOutDir scope;
    const auto text = cli({"oracle", "--env", "small"});
    CHECK(text.code == kExitOk);
    for (const char* section : {"[v_star]", "[q_star]", "[t_sharp]", "[optimal_actions]", "[tau]"})
      CHECK(text.out.find(section) != std::string::npos);
    CHECK(text.out.find("1 3 1.7\n") != std::string::npos);
    CHECK(text.out.find("1 2 0.935\n") != std::string::npos);

    const auto j = nlohmann::json::parse(cli({"oracle", "--env", "small", "--format", "json"}).out);
    CHECK(j.at("v_star")[0].get<double>() == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(j.at("tau")[0].get<int>() == 3);
    CHECK(j.at("tau_path") == nlohmann::json::array({1, 3}));
    CHECK(j.at("optimal_actions")[2] == nlohmann::json::array({11}));
  }

  TEST_CASE("run writes the per-trial CSV") {
    ScopedOutDir scope;
    TempDir dir;
    const auto path = (dir.path / "results.csv").string();
    const auto r = cli(with(kQuickRun, {"--out", path}));
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    CHECK(r.err.find("6/6 trials converged") != std::string::npos);
    const auto csv = slurp(path);
    CHECK(count_lines(csv) == 7);
    CHECK(csv.rfind("experiment_id,algorithm,env,n_actions,trial,seed,", 0) == 0);
    CHECK(csv.find("small_t_learning_a3,t_learning,small,3,0,") != std::string::npos);
  }

  TEST_CASE("run output does not depend on the worker count") {
    ScopedOutDir scope;
    const auto one = cli(with(kQuickRun, {"--jobs", "1"}));
    const auto four = cli(with(kQuickRun, {"--jobs", "4"}));
    CHECK(one.code == kExitOk);
    CHECK(one.out == four.out);
    const auto q1 = cli(with(kQuickRun, {"--algo", "q_learning", "--jobs", "1", "--format", "json"}));
    const auto q3 = cli(with(kQuickRun, {"--algo", "q_learning", "--jobs", "3", "--format", "json"}));
    CHECK(q1.out == q3.out);
    CHECK(nlohmann::json::parse(q1.out).at("trials").size() == 6);
  }

  TEST_CASE("non-converged runs exit 2 and still write data") {
    ScopedOutDir scope;
    TempDir dir;
    const auto path = (dir.path / "capped.csv").string();
    const auto trace = (dir.path / "capped_trace.csv").string();
    const auto r = cli({"run", "--env", "beam", "--n", "2", "--trials", "2", "--max-episodes", "1", "--out", path,
                        "--trace-out", trace});
    CHECK(r.code == kExitNotConverged);
    const auto csv = slurp(path);
    CHECK(count_lines(csv) == 3);
    CHECK(csv.find(",false\n") != std::string::npos);
    CHECK(slurp(trace).rfind("trial,episode,visits_state_2,visits_state_3,visits_state_16\n", 0) == 0);
    CHECK(count_lines(slurp(trace)) == 3);
  }

  TEST_CASE("TLEARN_OUT_DIR names the default output") {
    TempDir dir;
    ScopedOutDir scope(dir.path.string());
    const auto r = cli(with(kQuickRun, {"--id", "quick"}));
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    CHECK(count_lines(slurp(dir.path / "quick.csv")) == 7);
    const auto j = cli(with(kQuickRun, {"--format", "json"}));
    CHECK(j.code == kExitOk);
    CHECK(std::filesystem::exists(dir.path / "small_t_learning_a3.json"));
  }

  TEST_CASE("explicit flags override the config file") {
    ScopedOutDir scope;
    TempDir dir;
    const auto cfg = (dir.path / "exp.cfg").string();
    {
      std::ofstream f(cfg);
      f << "[experiment]\nid = from_file\nalgorithm = q_learning\ntrials = 3\nseed = 5\n"
           "[environment]\nkind = small\nn = 1\n";
    }
    const auto from_file = cli({"run", "--config", cfg});
    CHECK(from_file.code == kExitOk);
    CHECK(count_lines(from_file.out) == 4);
    CHECK(from_file.out.find("from_file,q_learning,small,3,") != std::string::npos);

    const auto overridden = cli({"run", "--config", cfg, "--trials", "2", "--algo", "t_learning"});
    CHECK(count_lines(overridden.out) == 3);
    CHECK(overridden.out.find("from_file,t_learning,") != std::string::npos);

    CHECK(cli({"validate", "--config", cfg}).code == kExitOk);
    { std::ofstream(cfg) << "[experiment]\nspeed = 3\n"; }
    const auto bad = cli({"run", "--config", cfg});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("speed") != std::string::npos);
  }

  TEST_CASE("sweep emits one row per n and algorithm") {
    ScopedOutDir scope;
    const auto r = cli({"sweep", "--env", "beam", "--n-list", "1,2", "--trials", "2", "--seed", "3"});
    CHECK(r.code == kExitOk);
    CHECK(count_lines(r.out) == 5);
    CHECK(r.out.rfind("n,n_actions,algorithm,", 0) == 0);
    CHECK(r.err.find("fitted ratio exponent") != std::string::npos);

    const auto opt = cli({"sweep", "--env", "small", "--n-list", "1", "--trials", "2", "--study", "optimistic"});
    CHECK(opt.code == kExitOk);
    CHECK(count_lines(opt.out) == 3);
    CHECK(opt.out.find(",optimistic,") != std::string::npos);
    CHECK(cli({"sweep", "--study", "bogus"}).code == kExitUsage);
  }

  TEST_CASE("export-env output validates and reloads") {
    ScopedOutDir scope;
    TempDir dir;
    const auto path = (dir.path / "beam.mdp").string();
    CHECK(cli({"export-env", "--env", "beam", "--n", "2", "--out", path}).code == kExitOk);
    CHECK(load_mdp_file(path).num_states() == 16);
    const auto v = cli({"validate", "--mdp-file", path});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find("valid") != std::string::npos);
    const auto run = cli({"run", "--mdp-file", path, "--trials", "1", "--seed", "2"});
    CHECK(run.code == kExitOk);
    CHECK(count_lines(run.out) == 2);
  }

  TEST_CASE("invalid MDP files are reported with exit 1") {
    ScopedOutDir scope;
    TempDir dir;
    const auto path = (dir.path / "broken.mdp").string();
    auto text = slurp(std::string(TLEARN_TEST_DATA) + "/small_n1.mdp");
    const auto pos = text.find(": 5 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 5, ": 5 0.5");
    { std::ofstream(path) << text; }
    const auto v = cli({"validate", "--mdp-file", path, "--format", "json"});
    CHECK(v.code == kExitUsage);
    const auto j = nlohmann::json::parse(v.out);
    CHECK_FALSE(j.at("valid").get<bool>());
    CHECK_FALSE(j.at("problems").empty());
    const auto run = cli({"run", "--mdp-file", path, "--trials", "1"});
    CHECK(run.code == kExitUsage);
    CHECK(run.err.find(path) != std::string::npos);
    CHECK(cli({"oracle", "--mdp-file", (dir.path / "missing.mdp").string()}).code == kExitUsage);
  }

  TEST_CASE("a failed write leaves no file behind") {
    ScopedOutDir scope;
    TempDir dir;
    const auto blocker = dir.path / "blocker";
    { std::ofstream(blocker) << "x"; }
    const auto target = (blocker / "out.csv").string();
    const auto r = cli(with(kQuickRun, {"--out", target}));
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find(target) != std::string::npos);
    CHECK(slurp(blocker) == "x");
  }
}
