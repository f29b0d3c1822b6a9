#pragma once

#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

#include "tlearn/experiments.hpp"

namespace tlearn {

enum class ExportFormat { Csv, Json };

std::optional<ExportFormat> parse_format(std::string_view name);

// Trial CSV columns, in order:
//   experiment_id, algorithm, env, n_actions, trial, seed,
//   steps_to_policy_convergence, episodes_to_policy_convergence,
//   episodes_to_t_convergence, converged
std::string results_csv(std::span<const AggregateResult> results);

/// One row per (trial, episode): trial, episode, visits_state_<k>...
std::string trace_csv(std::span<const AggregateResult> results);

/// Mirrors the CSV columns per trial plus the summary statistics. Traces are
/// included only on request.
nlohmann::json results_json(const AggregateResult& result, bool include_traces = false);
AggregateResult result_from_json(const nlohmann::json& j);

// Sweep CSV: one row per (n, algorithm) with the paired ratios and the
// fitted exponent repeated on every row.
std::string sweep_csv(const SweepResult& sweep);
nlohmann::json sweep_json(const SweepResult& sweep);

std::string optimistic_csv(std::span<const OptimisticCell> cells);
nlohmann::json optimistic_json(std::span<const OptimisticCell> cells);

/// Writes through a temporary sibling and renames it into place, so a failed
/// write never leaves a partial file. Throws std::runtime_error naming path.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace tlearn
