#pragma once

#include <cstdint>
#include <vector>

#include "qfl/feedback.hpp"
#include "qfl/picard.hpp"

namespace qfl {

struct ChaosConfig {
  std::vector<int> sizes{2, 4, 6, 8};
  int trajectories = 500;
  std::uint64_t master_seed = 0;
  int threads = 1;
  /// Applied to every site on its own marginal, and to the mean-field particle.
  FeedbackLaw law = FeedbackLaw::zero();
  PicardConfig picard;
};

struct ChaosReport {
  std::vector<int> sizes;
  /// sup_t ||E[tr_{2..N} rho_t^N] - xi(t)||_2 on the record grid.
  std::vector<double> distances;
  /// Monte-Carlo error of each distance, projected at its maximizing time.
  std::vector<double> standard_errors;
  std::vector<double> argmax_times;
  std::vector<int> ensemble_sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<double> times;
  /// Bloch vectors of the mean site-1 marginal per size, on `times`.
  std::vector<std::vector<Eigen::Vector3d>> marginal_paths;
  std::vector<Eigen::Vector3d> meanfield_path;
  PicardResult meanfield;

  /// d_{k+1} <= d_k + sigmas sqrt(se_k^2 + se_{k+1}^2) for consecutive sizes.
  bool non_increasing(double sigmas = 2.0) const;
};

/// N-body ensembles from rho0^{(x)N} on the Ising model against the Picard
/// mean-field flow on the same step grid; cfg.record_every sets the
/// comparison grid.
ChaosReport chaos_experiment(const DensityOperator& rho0, const IntegratorConfig& cfg, const ChaosConfig& chaos);

}  // namespace qfl
