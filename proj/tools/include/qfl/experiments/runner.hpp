#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfl/experiments/config.hpp"
#include "qfl/experiments/table.hpp"

namespace qfl::experiments {

struct RunResult {
  std::vector<ResultTable> tables;
  /// Experiment-specific statistics; becomes "results" in the report.
  nlohmann::json results;
  /// False when the run finished but did not reach its numerical goal
  /// (e.g. Picard iteration without convergence).
  bool converged = true;
  std::string diagnostic;
};

/// Validates cfg, then simulates. Throws ConfigError before any work on bad
/// input; numerical failures propagate as qfl::IntegrationBlowup.
RunResult run_experiment(const ExperimentConfig& cfg);

/// version, git description and compiler of this build.
nlohmann::json build_stamp();

/// {"config", "build", "seed", "results"}.
nlohmann::json make_report(const ExperimentConfig& cfg, const RunResult& result);

/// Writes <output>_<table>.csv for every table and <output>_report.json.
/// Returns the paths written.
std::vector<std::string> write_outputs(const ExperimentConfig& cfg, const RunResult& result);

}  // namespace qfl::experiments
