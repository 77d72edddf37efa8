#include "qfl/experiments/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "qfl/dpp.hpp"
#include "qfl/integrator.hpp"
#include "qfl/nbody_model.hpp"
#include "qfl/picard.hpp"

namespace qfl::experiments {

namespace {

constexpr std::array<std::pair<Experiment, const char*>, 9> kNames{{
    {Experiment::reduction, "reduction"},
    {Experiment::stabilize, "stabilize"},
    {Experiment::twoqubit_reduction, "twoqubit-reduction"},
    {Experiment::twoqubit_stabilize, "twoqubit-stabilize"},
    {Experiment::chaos, "chaos"},
    {Experiment::picard, "picard"},
    {Experiment::dynkin, "dynkin"},
    {Experiment::dpp, "dpp"},
    {Experiment::lipschitz, "lipschitz"},
}};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& field, std::set<std::string>& seen) {
  seen.insert(key);
  auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    field = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

bool uses_integrator(Experiment e) { return e != Experiment::lipschitz; }

bool single_qubit_initial(Experiment e) {
  return e == Experiment::reduction || e == Experiment::stabilize || e == Experiment::chaos ||
         e == Experiment::picard;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, name] : kNames) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kNames) {
    if (name == n) return k;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  require(threads >= 0, "threads must be >= 0");
  require(!output.empty(), "output prefix must not be empty");

  if (uses_integrator(experiment)) {
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    require(std::isfinite(horizon) && horizon > 0.0, "horizon must be positive");
    require(dt <= horizon, "dt must not exceed the horizon");
    require(std::abs(horizon / dt - std::round(horizon / dt)) < 1e-6, "horizon must be a multiple of dt");
    require(record_every >= 1, "record_every must be >= 1");
  }

  if (single_qubit_initial(experiment)) {
    const double n = std::sqrt(initial[0] * initial[0] + initial[1] * initial[1] + initial[2] * initial[2]);
    require(std::isfinite(n) && n <= 1.0 + 1e-9, "initial Bloch vector must lie in the unit ball");
  }

  switch (experiment) {
    case Experiment::reduction:
    case Experiment::stabilize:
    case Experiment::twoqubit_reduction:
    case Experiment::twoqubit_stabilize:
      require(trajectories >= 2, "trajectories must be >= 2");
      require(trace_count >= 0, "trace_count must be >= 0");
      require(classify_threshold > 0.0 && classify_threshold < 1.0, "classify_threshold must lie in (0, 1)");
      require(fit_window[0] >= 0.0 && fit_window[0] < fit_window[1] && fit_window[1] <= 1.0,
              "fit_window must satisfy 0 <= begin < end <= 1");
      break;
    default:
      break;
  }

  if (experiment == Experiment::stabilize || experiment == Experiment::twoqubit_stabilize) {
    require(kappa1 >= 0.0 && kappa2 >= 0.0, "gains must be >= 0");
    require(std::isfinite(alpha_max) && alpha_max > 0.0, "alpha_max must be positive");
  }
  if ((experiment == Experiment::picard || experiment == Experiment::chaos) && feedback) {
    require(kappa1 >= 0.0 && kappa2 >= 0.0, "gains must be >= 0");
    require(std::isfinite(alpha_max) && alpha_max > 0.0, "alpha_max must be positive");
  }
  if (experiment == Experiment::stabilize || experiment == Experiment::picard || experiment == Experiment::chaos) {
    require(target == "ground" || target == "excited", "target must be 'ground' or 'excited'");
  }
  if (experiment == Experiment::twoqubit_reduction || experiment == Experiment::twoqubit_stabilize) {
    const bool label = two_qubit_initial.size() == 2 &&
                       std::all_of(two_qubit_initial.begin(), two_qubit_initial.end(),
                                   [](char c) { return c == 'e' || c == 'g'; });
    require(two_qubit_initial == "mixed" || label, "two_qubit_initial must be 'mixed' or a label like 'ge'");
  }

  if (experiment == Experiment::chaos || experiment == Experiment::picard) {
    PicardConfig pc;
    pc.ensemble_size = picard_ensemble;
    pc.tolerance = picard_tolerance;
    pc.max_iterations = picard_max_iterations;
    try {
      pc.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("picard: ") + e.what());
    }
  }
  if (experiment == Experiment::chaos) {
    require(!sizes.empty(), "sizes must not be empty");
    for (int n : sizes) {
      require(n >= 2 && n <= kMaxDenseSites, "sizes must lie in [2, " + std::to_string(kMaxDenseSites) + "]");
    }
    require(trajectories >= 2, "trajectories must be >= 2");
  }

  if (experiment == Experiment::dynkin) {
    require(samples >= 2, "samples must be >= 2");
    require(epsilon >= 10.0 * dt, "epsilon must be >= 10 dt");
    require(epsilon <= horizon, "epsilon must not exceed the horizon");
  }

  if (experiment == Experiment::dpp) {
    require(tau > 0.0 && tau < horizon, "tau must lie strictly inside (0, horizon)");
    require(std::abs(tau / dt - std::round(tau / dt)) < 1e-6, "tau must be a multiple of dt");
    require(outer >= 2 && inner >= 2, "outer and inner must be >= 2");
    require(control_weight >= 0.0, "control_weight must be >= 0");
    ControlGrid g{grid, alpha_max};
    try {
      g.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
    const long long n = static_cast<long long>(outer) * inner * static_cast<long long>(grid.size() * grid.size());
    require(n <= DppConfig{}.max_inner_paths, "outer * inner * |grid|^2 exceeds the nested sample cap");
  }

  if (experiment == Experiment::lipschitz) {
    require(samples >= 1, "samples must be >= 1");
    require(!dims.empty(), "dims must not be empty");
    for (int d : dims) require(d >= 2 && d <= 16 && (d & (d - 1)) == 0, "dims must be powers of two in [2, 16]");
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = to_string(c.experiment);
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["record_every"] = c.record_every;
  j["repair"] = c.repair;
  j["trajectories"] = c.trajectories;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["trace_count"] = c.trace_count;
  j["initial"] = c.initial;
  j["two_qubit_initial"] = c.two_qubit_initial;
  j["target"] = c.target;
  j["kappa1"] = c.kappa1;
  j["kappa2"] = c.kappa2;
  j["alpha_max"] = c.alpha_max;
  j["feedback"] = c.feedback;
  j["classify_threshold"] = c.classify_threshold;
  j["fit_window"] = c.fit_window;
  j["sizes"] = c.sizes;
  j["picard_ensemble"] = c.picard_ensemble;
  j["picard_tolerance"] = c.picard_tolerance;
  j["picard_max_iterations"] = c.picard_max_iterations;
  j["common_random_numbers"] = c.common_random_numbers;
  j["epsilon"] = c.epsilon;
  j["samples"] = c.samples;
  j["tau"] = c.tau;
  j["grid"] = c.grid;
  j["outer"] = c.outer;
  j["inner"] = c.inner;
  j["control_weight"] = c.control_weight;
  j["dims"] = c.dims;
  j["output"] = c.output;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string name = to_string(c.experiment);
  read(doc, "experiment", name, seen);
  c.experiment = experiment_from_string(name);
  read(doc, "dt", c.dt, seen);
  read(doc, "horizon", c.horizon, seen);
  read(doc, "record_every", c.record_every, seen);
  read(doc, "repair", c.repair, seen);
  read(doc, "trajectories", c.trajectories, seen);
  read(doc, "seed", c.seed, seen);
  read(doc, "threads", c.threads, seen);
  read(doc, "trace_count", c.trace_count, seen);
  read(doc, "initial", c.initial, seen);
  read(doc, "two_qubit_initial", c.two_qubit_initial, seen);
  read(doc, "target", c.target, seen);
  read(doc, "kappa1", c.kappa1, seen);
  read(doc, "kappa2", c.kappa2, seen);
  read(doc, "alpha_max", c.alpha_max, seen);
  read(doc, "feedback", c.feedback, seen);
  read(doc, "classify_threshold", c.classify_threshold, seen);
  read(doc, "fit_window", c.fit_window, seen);
  read(doc, "sizes", c.sizes, seen);
  read(doc, "picard_ensemble", c.picard_ensemble, seen);
  read(doc, "picard_tolerance", c.picard_tolerance, seen);
  read(doc, "picard_max_iterations", c.picard_max_iterations, seen);
  read(doc, "common_random_numbers", c.common_random_numbers, seen);
  read(doc, "epsilon", c.epsilon, seen);
  read(doc, "samples", c.samples, seen);
  read(doc, "tau", c.tau, seen);
  read(doc, "grid", c.grid, seen);
  read(doc, "outer", c.outer, seen);
  read(doc, "inner", c.inner, seen);
  read(doc, "control_weight", c.control_weight, seen);
  read(doc, "dims", c.dims, seen);
  read(doc, "output", c.output, seen);
  for (const auto& [key, value] : doc.items()) {
    if (!seen.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace qfl::experiments
