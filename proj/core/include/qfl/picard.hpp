#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfl/ensemble.hpp"
#include "qfl/meanfield.hpp"

namespace qfl {

struct PicardConfig {
  int ensemble_size = 2000;
  /// Stop once sup_t ||xi^{k+1}(t) - xi^k(t)||_2 <= tolerance.
  double tolerance = 1e-3;
  int max_iterations = 20;
  /// Reuse the same trajectory seeds in every iteration.
  bool common_random_numbers = true;
  std::uint64_t master_seed = 0;
  int threads = 1;

  void validate() const;
};

struct FrozenFlowResult {
  /// Empirical mean state at every step of the grid.
  MeanFieldFlow mean;
  /// Per grid point: sqrt(sum of Bloch-component variances / M) / sqrt(2),
  /// the HS-norm scale of the mean's Monte-Carlo error (qubits only).
  std::vector<double> standard_error;
  std::vector<DensityOperator> terminal;
  long repairs = 0;
};

/// Integrates the filter with the mean-field term frozen to A^{xi(t)}.
/// `base` supplies H, L and the control operators; it must not carry a hook.
FrozenFlowResult simulate_frozen_flow(const DensityOperator& rho0, const SdeModel& base, const TwoBodyKernel& kernel,
                                      const MeanFieldFlow& xi, const ControlPolicy& policy,
                                      const IntegratorConfig& cfg, int trajectories, std::uint64_t master_seed,
                                      int threads = 1);

struct PicardResult {
  MeanFieldFlow flow;
  int iterations = 0;
  std::vector<double> residuals;
  bool converged = false;
  std::string diagnostic;
  /// Monte-Carlo error of the last empirical mean, sup over t.
  double standard_error = 0.0;
};

/// xi^{k+1} = mean of frozen-flow trajectories driven by xi^k, from the
/// constant flow xi^0 = rho0. Non-convergence is reported via `converged`
/// and `diagnostic` rather than thrown.
PicardResult picard_solve(const DensityOperator& rho0, const SdeModel& base, const TwoBodyKernel& kernel,
                          const ControlPolicy& policy, const IntegratorConfig& cfg, const PicardConfig& picard);

}  // namespace qfl
