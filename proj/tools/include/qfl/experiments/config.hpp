#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qfl::experiments {

enum class Experiment {
  reduction,
  stabilize,
  twoqubit_reduction,
  twoqubit_stabilize,
  chaos,
  picard,
  dynkin,
  dpp,
  lipschitz,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

// Bad field, unknown key or unparsable document. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::reduction;

  double dt = 1e-4;
  double horizon = 5.0;
  int record_every = 100;
  bool repair = true;

  int trajectories = 200;
  std::uint64_t seed = 1;
  /// Worker count; 0 picks the hardware concurrency. Never affects results.
  int threads = 0;
  /// Per-trajectory traces written for the first trace_count seeds.
  int trace_count = 10;

  /// Single-site initial Bloch vector.
  std::array<double, 3> initial{0.0, 0.0, 0.0};
  /// Two-qubit initial state: "mixed" or a product label over {e, g}.
  std::string two_qubit_initial = "mixed";

  /// Stabilization target of the single-qubit law: "ground" or "excited".
  std::string target = "ground";
  double kappa1 = 5.0;
  double kappa2 = 1.0;
  double alpha_max = 10.0;
  /// Closes the loop in the picard and chaos experiments.
  bool feedback = false;

  double classify_threshold = 0.99;
  /// Lyapunov fit window as fractions of the horizon.
  std::array<double, 2> fit_window{0.5, 0.8};

  std::vector<int> sizes{2, 4, 6, 8};

  int picard_ensemble = 2000;
  double picard_tolerance = 1e-3;
  int picard_max_iterations = 20;
  bool common_random_numbers = true;

  double epsilon = 1e-3;
  int samples = 10000;

  double tau = 0.5;
  std::vector<double> grid{-1.0, 0.0, 1.0};
  int outer = 2000;
  int inner = 200;
  double control_weight = 0.0;

  std::vector<int> dims{2, 4};

  /// Output path prefix; files are <output>_<table>.csv and <output>_report.json.
  std::string output = "qfl_out";

  bool operator==(const ExperimentConfig&) const = default;

  /// Checks every field the chosen experiment reads. Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

}  // namespace qfl::experiments
