#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qfl/density.hpp"
#include "qfl/sde_model.hpp"

namespace qfl {

// Fills `controls` (one entry per control operator) from the state at the
// start of a step. Must be safe to call concurrently from several threads.
using ControlPolicy = std::function<void(StateView state, double t, std::span<double> controls)>;

ControlPolicy constant_controls(std::vector<double> values);

struct IntegratorConfig {
  double dt = 1e-4;
  double horizon = 5.0;
  double t0 = 0.0;
  std::uint64_t seed = 0;
  bool repair_positivity = true;
  /// States and records are kept every `record_every` steps (and at the end).
  int record_every = 1;
  /// Largest tolerated negative eigenvalue before clipping. 0 selects
  /// max(1e-4, 50 dt sum_k ||L_k||^2).
  double blowup_threshold = 0.0;

  void validate() const;
  long steps() const;
  std::vector<double> record_times() const;
  bool is_record_step(long n) const;
};

double default_blowup_threshold(const SdeModel& model, double dt);

struct StepStats {
  double min_eigenvalue = 0.0;
  bool clipped = false;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<DensityOperator> states;
  Eigen::MatrixXd controls;     // steps x control channels
  Eigen::MatrixXd innovations;  // steps x measurement channels
  Eigen::MatrixXd records;      // records x measurement channels, Y(t0) = 0
  long steps = 0;
  long repairs = 0;
};

/// One Euler-Maruyama step followed by Hermitization, trace renormalization
/// and (if repair) eigenvalue clipping.
DensityOperator sme_step(const DensityOperator& rho, const SdeModel& model, std::span<const double> controls,
                         std::span<const double> dw, double dt, double t, bool repair = true,
                         double blowup_threshold = 0.0, StepStats* stats = nullptr);

/// Noise for channel c comes from channel_seed(cfg.seed, c). A null policy
/// means all controls are zero.
TrajectoryRecord simulate_trajectory(const DensityOperator& rho0, const SdeModel& model,
                                     const ControlPolicy& policy, const IntegratorConfig& cfg);

using ControlPath = std::function<void(double t, std::span<double> controls)>;

struct LindbladPath {
  std::vector<double> times;
  std::vector<DensityOperator> states;
};

/// Classical RK4 for d rho/dt = L[rho, beta(t)] on the record grid of cfg.
LindbladPath lindblad_ode(const DensityOperator& rho0, const SdeModel& model, const ControlPath& controls,
                          const IntegratorConfig& cfg);

}  // namespace qfl
