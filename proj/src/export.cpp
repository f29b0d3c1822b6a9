#include "tlearn/export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tlearn/text_format.hpp"

namespace tlearn {

using nlohmann::json;

std::optional<ExportFormat> parse_format(std::string_view name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  return std::nullopt;
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string results_csv(std::span<const AggregateResult> results) {
  std::ostringstream out;
  out << "experiment_id,algorithm,env,n_actions,trial,seed,steps_to_policy_convergence,"
         "episodes_to_policy_convergence,episodes_to_t_convergence,converged\n";
  for (const auto& agg : results)
    for (const auto& t : agg.trials) {
      out << agg.experiment_id << ',' << to_string(agg.algorithm) << ',' << agg.env << ',' << agg.n_actions << ','
          << t.trial << ',' << t.seed << ',' << t.steps_to_policy_convergence << ','
          << t.episodes_to_policy_convergence << ',';
      if (t.episodes_to_t_convergence) out << *t.episodes_to_t_convergence;
      out << ',' << (t.converged ? "true" : "false") << '\n';
    }
  return out.str();
}

std::string trace_csv(std::span<const AggregateResult> results) {
  std::ostringstream out;
  bool header = false;
  for (const auto& agg : results)
    for (const auto& t : agg.trials) {
      if (!header) {
        out << "trial,episode";
        for (auto s : t.visits.states) out << ",visits_state_" << label(s);
        out << '\n';
        header = true;
      }
      const std::size_t slots = t.visits.states.size();
      for (std::size_t e = 0; e < t.visits.episodes(); ++e) {
        out << t.trial << ',' << e + 1;
        for (std::size_t k = 0; k < slots; ++k) out << ',' << t.visits.count(e, k);
        out << '\n';
      }
    }
  if (!header) out << "trial,episode\n";
  return out.str();
}

json results_json(const AggregateResult& agg, bool include_traces) {
  json trials = json::array();
  for (const auto& t : agg.trials) {
    json row{{"trial", t.trial},
             {"seed", t.seed},
             {"steps_to_policy_convergence", t.steps_to_policy_convergence},
             {"episodes_to_policy_convergence", t.episodes_to_policy_convergence},
             {"episodes_to_t_convergence",
              t.episodes_to_t_convergence ? json(*t.episodes_to_t_convergence) : json(nullptr)},
             {"converged", t.converged},
             {"total_steps", t.total_steps},
             {"total_episodes", t.total_episodes}};
    if (include_traces) {
      json states = json::array();
      for (auto s : t.visits.states) states.push_back(label(s));
      row["visit_trace"] = {{"states", states}, {"counts", t.visits.counts}};
    }
    trials.push_back(std::move(row));
  }
  return json{{"experiment_id", agg.experiment_id},
              {"algorithm", to_string(agg.algorithm)},
              {"env", agg.env},
              {"n_actions", agg.n_actions},
              {"mean_steps", agg.mean_steps},
              {"std_steps", opt_json(agg.std_steps)},
              {"mean_episodes", agg.mean_episodes},
              {"std_episodes", opt_json(agg.std_episodes)},
              {"mean_episodes_to_t_convergence", opt_json(agg.mean_t_episodes)},
              {"converged_trials", agg.converged_trials},
              {"trials", std::move(trials)}};
}

AggregateResult result_from_json(const json& j) {
  const auto algo = parse_algorithm(j.at("algorithm").get<std::string>());
  if (!algo) throw std::invalid_argument("unknown algorithm in results JSON");
  std::vector<TrialResult> trials;
  for (const auto& row : j.at("trials")) {
    TrialResult t;
    t.trial = row.at("trial").get<std::size_t>();
    t.seed = row.at("seed").get<std::uint64_t>();
    t.steps_to_policy_convergence = row.at("steps_to_policy_convergence").get<std::uint64_t>();
    t.episodes_to_policy_convergence = row.at("episodes_to_policy_convergence").get<std::uint64_t>();
    if (!row.at("episodes_to_t_convergence").is_null())
      t.episodes_to_t_convergence = row.at("episodes_to_t_convergence").get<std::uint64_t>();
    t.converged = row.at("converged").get<bool>();
    t.total_steps = row.value("total_steps", std::uint64_t{0});
    t.total_episodes = row.value("total_episodes", std::uint64_t{0});
    if (row.contains("visit_trace")) {
      for (auto l : row.at("visit_trace").at("states")) t.visits.states.push_back(state_label(l.get<std::uint32_t>()));
      t.visits.counts = row.at("visit_trace").at("counts").get<std::vector<std::uint16_t>>();
    }
    trials.push_back(std::move(t));
  }
  auto agg = aggregate(j.at("experiment_id").get<std::string>(), *algo, j.at("env").get<std::string>(),
                       j.at("n_actions").get<std::size_t>(), std::move(trials));
  // Stored statistics win over recomputation so the reparse is field-exact.
  agg.mean_steps = j.at("mean_steps").get<double>();
  agg.std_steps = opt_from(j, "std_steps");
  agg.mean_episodes = j.at("mean_episodes").get<double>();
  agg.std_episodes = opt_from(j, "std_episodes");
  agg.mean_t_episodes = opt_from(j, "mean_episodes_to_t_convergence");
  agg.converged_trials = j.at("converged_trials").get<std::size_t>();
  return agg;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "n,n_actions,algorithm,trials,mean_steps,std_steps,mean_episodes,std_episodes,"
         "mean_episodes_to_t_convergence,converged_trials,ratio_q_to_t_episodes,ratio_q_to_t_steps,"
         "fitted_exponent\n";
  for (const auto& cell : sweep.cells)
    for (const AggregateResult* agg : {&cell.t_learning, &cell.q_learning}) {
      out << cell.n << ',' << cell.n_actions << ',' << to_string(agg->algorithm) << ',' << agg->trials.size() << ','
          << format_double(agg->mean_steps) << ',' << opt_number(agg->std_steps) << ','
          << format_double(agg->mean_episodes) << ',' << opt_number(agg->std_episodes) << ','
          << opt_number(agg->mean_t_episodes) << ',' << agg->converged_trials << ','
          << format_double(cell.ratio_episodes) << ',' << format_double(cell.ratio_steps) << ','
          << format_double(sweep.fitted_exponent) << '\n';
    }
  return out.str();
}

json sweep_json(const SweepResult& sweep) {
  json cells = json::array();
  for (const auto& cell : sweep.cells)
    cells.push_back({{"n", cell.n},
                     {"n_actions", cell.n_actions},
                     {"ratio_q_to_t_episodes", cell.ratio_episodes},
                     {"ratio_q_to_t_steps", cell.ratio_steps},
                     {"t_learning", results_json(cell.t_learning)},
                     {"q_learning", results_json(cell.q_learning)}});
  return {{"fitted_exponent", sweep.fitted_exponent}, {"cells", std::move(cells)}};
}

std::string optimistic_csv(std::span<const OptimisticCell> cells) {
  std::ostringstream out;
  out << "n,n_actions,init_value,trials,mean_steps,mean_episodes,converged_trials,ratio_optimistic_to_baseline\n";
  for (const auto& cell : cells)
    for (const AggregateResult* agg : {&cell.baseline, &cell.optimistic}) {
      const bool optimistic = agg == &cell.optimistic;
      out << cell.n << ',' << cell.n_actions << ',' << (optimistic ? "optimistic" : "baseline") << ','
          << agg->trials.size() << ',' << format_double(agg->mean_steps) << ','
          << format_double(agg->mean_episodes) << ',' << agg->converged_trials << ','
          << format_double(cell.ratio_episodes) << '\n';
    }
  return out.str();
}

json optimistic_json(std::span<const OptimisticCell> cells) {
  json out = json::array();
  for (const auto& cell : cells)
    out.push_back({{"n", cell.n},
                   {"n_actions", cell.n_actions},
                   {"ratio_optimistic_to_baseline", cell.ratio_episodes},
                   {"baseline", results_json(cell.baseline)},
                   {"optimistic", results_json(cell.optimistic)}});
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory for '" + path + "': " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

}  // namespace tlearn
