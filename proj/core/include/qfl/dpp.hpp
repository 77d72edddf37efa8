#pragma once

#include <cstdint>
#include <vector>

#include "qfl/generator.hpp"

namespace qfl {

// Admissible constant levels for a single control channel.
struct ControlGrid {
  std::vector<double> values;
  double alpha_max = 10.0;

  /// Non-empty, sorted, |value| <= alpha_max.
  void validate() const;
};

struct DppConfig {
  int outer = 2000;
  int inner = 200;
  /// Cap on outer * inner * |grid|^2 second-leg paths.
  long long max_inner_paths = 5'000'000;
  std::uint64_t master_seed = 0;
  int threads = 1;
};

struct DppReport {
  /// Cost of the switching control: first-leg level, then at tau the
  /// second-leg level chosen by the nested estimate, minimized over the
  /// first-leg level.
  double lhs = 0.0;
  double lhs_se = 0.0;
  /// min over first-leg levels of E[int_0^tau C + V(tau, rho_tau)].
  double rhs = 0.0;
  double rhs_se = 0.0;
  double gap = 0.0;
  /// 3 sqrt(lhs_se^2 + rhs_se^2).
  double tolerance = 0.0;
  /// min over full-horizon constant controls.
  double lhs_constant = 0.0;
  double lhs_constant_se = 0.0;

  std::vector<double> lhs_by_level;
  std::vector<double> rhs_by_level;
  std::vector<double> constant_by_level;

  /// |gap| <= tolerance and lhs_constant >= rhs - tolerance.
  bool consistent() const;
};

/// Monte-Carlo dynamic-programming check on piecewise-constant controls with
/// one switch at tau, for a model with exactly one control channel. Throws
/// BudgetExceeded before simulating if the nested sample count passes the cap.
DppReport dpp_check(const DensityOperator& rho0, const SdeModel& model, const CostSpec& cost, const ControlGrid& grid,
                    double tau, const IntegratorConfig& cfg, const DppConfig& dpp);

}  // namespace qfl
