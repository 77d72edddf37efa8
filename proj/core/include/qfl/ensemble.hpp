#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qfl/integrator.hpp"

namespace qfl {

struct Observable {
  std::string name;
  std::function<double(StateView)> evaluate;
};

/// Re tr(rho op).
Observable expectation_observable(std::string name, ComplexMatrix op);

struct EnsembleConfig {
  int trajectories = 1000;
  std::uint64_t master_seed = 0;
  int threads = 1;
  /// Maps the full state to the matrix whose mean is tracked and on which
  /// observables act (default: identity). Used for N-body marginals.
  std::function<ComplexMatrix(StateView)> reducer;
  std::vector<Observable> observables;
  bool keep_terminal = true;

  void validate() const;
};

struct EnsembleSummary {
  std::vector<double> times;
  std::vector<ComplexMatrix> mean_state;
  Eigen::MatrixXd observable_mean;      // times x observables
  Eigen::MatrixXd observable_variance;  // unbiased sample variance
  std::vector<std::string> observable_names;
  /// Reduced terminal states in trajectory-index order.
  std::vector<DensityOperator> terminal;
  int trajectories = 0;
  long steps = 0;
  long repairs = 0;

  double standard_error(Eigen::Index time_index, Eigen::Index observable) const;
  Eigen::Index observable_index(const std::string& name) const;
};

// Runs trajectory i (seed = trajectory_seed(master, i)) and reports each
// recorded point through the callback.
using RecordSink = std::function<void(std::size_t k, StateView rho)>;
struct PathOutcome {
  long steps = 0;
  long repairs = 0;
};
using PathRunner = std::function<PathOutcome(std::uint64_t seed, const RecordSink& sink)>;

/// Deterministic parallel reduction: trajectories are grouped in fixed
/// blocks, blocks are merged in index order, so results do not depend on
/// the thread count.
EnsembleSummary run_ensemble(const std::vector<double>& times, const EnsembleConfig& ens, const PathRunner& runner);

EnsembleSummary simulate_ensemble(const DensityOperator& rho0, const SdeModel& model, const ControlPolicy& policy,
                                  const IntegratorConfig& cfg, const EnsembleConfig& ens);

/// Invokes fn(i) for i in [0, count) over `threads` workers in fixed
/// blocks of `block`; fn must write only to slot i of its outputs.
void parallel_for(int count, int threads, const std::function<void(int)>& fn, int block = 16);

int default_thread_count();

}  // namespace qfl
