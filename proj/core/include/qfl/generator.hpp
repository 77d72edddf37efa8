#pragma once

#include <cstdint>
#include <span>

#include "qfl/functional.hpp"
#include "qfl/integrator.hpp"

namespace qfl {

/// Re<tau, grad G[rho]>. Analytic for constant/linear/quadratic kinds,
/// Richardson-refined central differences (h = 1e-4, 1e-5) for custom ones.
/// tau must be Hermitian and traceless to 1e-10.
double frechet_gradient(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& tau);

/// Central-difference directional derivative with Richardson refinement,
/// used for custom functionals and as an independent check of the analytic path.
double numeric_directional_derivative(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& tau);
/// Same scheme for the second derivative along tau.
double numeric_second_derivative(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& tau);

/// D(rho, beta) G = Re<L[rho, beta], grad G> + 1/2 sum_k D^2 G(R_k[rho], R_k[rho]).
double generator_apply(const Functional& g, const ComplexMatrix& rho, std::span<const double> controls,
                       const SdeModel& model, double t = 0.0);

struct DynkinReport {
  double mc_estimate = 0.0;
  double generator_value = 0.0;
  double standard_error = 0.0;
  /// eps/2 |D(DG)(rho0)|: leading-order bias of the difference quotient.
  double bias_bound = 0.0;
  double epsilon = 0.0;
  int samples = 0;

  bool within_tolerance(double sigmas = 3.0) const;
};

struct MonteCarloConfig {
  int samples = 10000;
  std::uint64_t master_seed = 0;
  int threads = 1;
};

/// (mean over samples of G(rho_eps) - G(rho0)) / eps under constant controls.
/// cfg supplies dt; requires eps >= 10 dt. Paths run without eigenvalue
/// clipping whatever cfg says.
DynkinReport dynkin_check(const Functional& g, const DensityOperator& rho0, const SdeModel& model,
                          std::span<const double> controls, double eps, const IntegratorConfig& cfg,
                          const MonteCarloConfig& mc);

struct CostSpec {
  /// State part of the running cost, C(rho, beta) = running(rho) + |beta|^2 Re<rho, C2>.
  Functional running = Functional::constant(0.0);
  /// C2; empty means no control penalty.
  ComplexMatrix control_weight;
  Functional terminal = Functional::constant(0.0);

  double running_cost(const ComplexMatrix& rho, std::span<const double> controls) const;
};

struct CostSample {
  double running = 0.0;
  double terminal = 0.0;
  ComplexMatrix final_state;
};

/// One path: trapezoid integral of the running cost on the step grid plus
/// the terminal cost. Noise from trajectory seed `seed`.
CostSample sample_cost(const ComplexMatrix& rho0, const SdeModel& model, const ControlPolicy& policy,
                       const CostSpec& cost, const IntegratorConfig& cfg, std::uint64_t seed);

struct CostEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  double running_mean = 0.0;
  double terminal_mean = 0.0;
  int samples = 0;
};

CostEstimate evaluate_cost(const DensityOperator& rho0, const SdeModel& model, const ControlPolicy& policy,
                           const CostSpec& cost, const IntegratorConfig& cfg, const MonteCarloConfig& mc);

struct FlowPropertyReport {
  double full_mean = 0.0;
  double full_se = 0.0;
  double restarted_mean = 0.0;
  double restarted_se = 0.0;

  bool within_tolerance(double sigmas = 3.0) const;
};

/// E[G(rho_T)] directly versus E over rho_tau of a restarted estimate of
/// E[G(rho_T) | rho_tau], zero control.
FlowPropertyReport flow_property_check(const Functional& g, const DensityOperator& rho0, const SdeModel& model,
                                       double tau, const IntegratorConfig& cfg, int outer, int inner,
                                       std::uint64_t master_seed, int threads = 1);

}  // namespace qfl
