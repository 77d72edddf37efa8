#include "qfl/generator.hpp"

#include <cmath>
#include <vector>

#include "qfl/ensemble.hpp"
#include "qfl/errors.hpp"
#include "qfl/noise.hpp"
#include "qfl/superoperators.hpp"
#include "sme_kernel.hpp"

namespace qfl {

namespace {

constexpr double kH1 = 1e-4;
constexpr double kH2 = 1e-5;

double central(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& u, double h) {
  return (g(ComplexMatrix(rho + h * u)) - g(ComplexMatrix(rho - h * u))) / (2.0 * h);
}

double second_central(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& u, double h) {
  return (g(ComplexMatrix(rho + h * u)) - 2.0 * g(rho) + g(ComplexMatrix(rho - h * u))) / (h * h);
}

class TerminalObserver : public detail::PathObserver {
 public:
  void on_record(std::size_t, double, StateView rho, std::span<const double>) override { last = rho; }
  ComplexMatrix last;
};

// Trapezoid rule on the step grid; the control of step k is paired with the
// state at t_k, and the final point reuses the last control.
class CostObserver : public detail::PathObserver {
 public:
  CostObserver(const CostSpec& cost, double dt) : cost_(cost), dt_(dt) {}

  void on_record(std::size_t, double, StateView rho, std::span<const double>) override {
    state_ = rho;
    has_pending_ = true;
  }

  void on_step(long, std::span<const double> u, std::span<const double>) override {
    last_u_.assign(u.begin(), u.end());
    add_point(cost_.running_cost(state_, u));
    has_pending_ = false;
  }

  CostSample finish() {
    if (has_pending_) add_point(cost_.running_cost(state_, last_u_));
    CostSample s;
    s.running = integral_;
    s.terminal = cost_.terminal(state_);
    s.final_state = state_;
    return s;
  }

 private:
  void add_point(double c) {
    if (have_prev_) integral_ += 0.5 * dt_ * (prev_ + c);
    prev_ = c;
    have_prev_ = true;
  }

  const CostSpec& cost_;
  double dt_;
  ComplexMatrix state_;
  std::vector<double> last_u_;
  double prev_ = 0.0;
  double integral_ = 0.0;
  bool have_prev_ = false;
  bool has_pending_ = false;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  const double n = static_cast<double>(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return r;
}

}  // namespace

double numeric_directional_derivative(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& tau) {
  const double n = tau.norm();
  if (n == 0.0) return 0.0;
  const ComplexMatrix u = tau / n;
  const double d1 = central(g, rho, u, kH1);
  const double d2 = central(g, rho, u, kH2);
  const double ratio = kH1 / kH2;
  return n * (d2 + (d2 - d1) / (ratio * ratio - 1.0));
}

double numeric_second_derivative(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& tau) {
  const double n = tau.norm();
  if (n == 0.0) return 0.0;
  const ComplexMatrix u = tau / n;
  // larger steps than the first derivative: the second difference divides by h^2
  const double s1 = second_central(g, rho, u, 1e-3);
  const double s2 = second_central(g, rho, u, 5e-4);
  return n * n * (s2 + (s2 - s1) / 3.0);
}

double frechet_gradient(const Functional& g, const ComplexMatrix& rho, const ComplexMatrix& tau) {
  require_same_dim(rho, tau, "frechet_gradient");
  const double tol = 1e-10 * std::max(1.0, tau.norm());
  if (hermiticity_defect(tau) > tol) throw InvalidArgument("frechet_gradient: direction must be Hermitian");
  if (std::abs(tau.trace()) > tol) throw InvalidArgument("frechet_gradient: direction must be traceless");
  if (g.kind() == Functional::Kind::custom) return numeric_directional_derivative(g, rho, tau);
  return hs_inner(tau, g.gradient(rho)).real();
}

double generator_apply(const Functional& g, const ComplexMatrix& rho, std::span<const double> controls,
                       const SdeModel& model, double t) {
  model.validate();
  require_same_dim(rho, model.hamiltonian, "generator_apply");
  if (g.kind() == Functional::Kind::constant) return 0.0;
  const ComplexMatrix drift = lindbladian(rho, model, controls, t);
  double v = 0.0;
  if (g.kind() == Functional::Kind::custom) {
    v = numeric_directional_derivative(g, rho, drift);
    for (const auto& l : model.couplings) v += 0.5 * numeric_second_derivative(g, rho, measurement_superop(rho, l));
    return v;
  }
  v = hs_inner(drift, g.gradient(rho)).real();
  for (const auto& l : model.couplings) v += 0.5 * g.second_derivative(measurement_superop(rho, l));
  return v;
}

bool DynkinReport::within_tolerance(double sigmas) const {
  return std::abs(mc_estimate - generator_value) <= sigmas * standard_error + bias_bound;
}

DynkinReport dynkin_check(const Functional& g, const DensityOperator& rho0, const SdeModel& model,
                          std::span<const double> controls, double eps, const IntegratorConfig& cfg,
                          const MonteCarloConfig& mc) {
  model.validate();
  if (eps < 10.0 * cfg.dt * (1.0 - 1e-12)) throw InvalidArgument("dynkin_check: eps must be at least 10 dt");
  if (mc.samples < 2) throw InvalidArgument("dynkin_check: need at least two samples");
  IntegratorConfig c = cfg;
  c.t0 = 0.0;
  c.horizon = eps;
  c.record_every = static_cast<int>(c.steps());
  // clipping at pure states shifts the quotient by O(1)
  c.repair_positivity = false;
  c.validate();
  const std::vector<double> u(controls.begin(), controls.end());
  const ControlPolicy policy = constant_controls(u);
  const double g0 = g(rho0.matrix());

  std::vector<double> values(static_cast<std::size_t>(mc.samples));
  parallel_for(mc.samples, mc.threads, [&](int i) {
    TerminalObserver obs;
    detail::integrate_path(rho0.matrix(), model, policy, c, trajectory_seed(mc.master_seed, static_cast<std::uint64_t>(i)), obs);
    values[static_cast<std::size_t>(i)] = (g(obs.last) - g0) / eps;
  });
  const MeanSe ms = mean_se(values);

  DynkinReport rep;
  rep.mc_estimate = ms.mean;
  rep.standard_error = ms.se;
  rep.generator_value = generator_apply(g, rho0.matrix(), u, model);
  const Functional dg = Functional::custom(
      [g, u, model](const ComplexMatrix& r) { return generator_apply(g, r, u, model); });
  rep.bias_bound = 0.5 * eps * std::abs(generator_apply(dg, rho0.matrix(), u, model));
  rep.epsilon = eps;
  rep.samples = mc.samples;
  return rep;
}

double CostSpec::running_cost(const ComplexMatrix& rho, std::span<const double> controls) const {
  double c = running(rho);
  if (control_weight.size() != 0) {
    double b2 = 0.0;
    for (double b : controls) b2 += b * b;
    if (b2 != 0.0) c += b2 * hs_inner(rho, control_weight).real();
  }
  return c;
}

CostSample sample_cost(const ComplexMatrix& rho0, const SdeModel& model, const ControlPolicy& policy,
                       const CostSpec& cost, const IntegratorConfig& cfg, std::uint64_t seed) {
  IntegratorConfig c = cfg;
  c.record_every = 1;
  CostObserver obs(cost, c.dt);
  detail::integrate_path(rho0, model, policy, c, seed, obs);
  return obs.finish();
}

CostEstimate evaluate_cost(const DensityOperator& rho0, const SdeModel& model, const ControlPolicy& policy,
                           const CostSpec& cost, const IntegratorConfig& cfg, const MonteCarloConfig& mc) {
  model.validate();
  cfg.validate();
  if (mc.samples < 1) throw InvalidArgument("evaluate_cost: need at least one sample");
  std::vector<double> running(static_cast<std::size_t>(mc.samples)), terminal(running.size()), total(running.size());
  parallel_for(mc.samples, mc.threads, [&](int i) {
    const CostSample s = sample_cost(rho0.matrix(), model, policy, cost, cfg,
                                     trajectory_seed(mc.master_seed, static_cast<std::uint64_t>(i)));
    const auto k = static_cast<std::size_t>(i);
    running[k] = s.running;
    terminal[k] = s.terminal;
    total[k] = s.running + s.terminal;
  });
  CostEstimate e;
  const MeanSe t = mean_se(total);
  e.mean = t.mean;
  e.standard_error = t.se;
  e.running_mean = mean_se(running).mean;
  e.terminal_mean = mean_se(terminal).mean;
  e.samples = mc.samples;
  return e;
}

bool FlowPropertyReport::within_tolerance(double sigmas) const {
  return std::abs(full_mean - restarted_mean) <= sigmas * std::hypot(full_se, restarted_se);
}

FlowPropertyReport flow_property_check(const Functional& g, const DensityOperator& rho0, const SdeModel& model,
                                       double tau, const IntegratorConfig& cfg, int outer, int inner,
                                       std::uint64_t master_seed, int threads) {
  model.validate();
  cfg.validate();
  if (!(tau > cfg.t0 && tau < cfg.horizon)) throw InvalidArgument("flow_property_check: tau must lie inside the horizon");
  if (outer < 2 || inner < 1) throw InvalidArgument("flow_property_check: invalid sample counts");
  IntegratorConfig full = cfg, first = cfg, second = cfg;
  first.horizon = tau;
  second.t0 = tau;
  for (IntegratorConfig* c : {&full, &first, &second}) c->record_every = static_cast<int>(c->steps());

  const std::uint64_t restart_master = splitmix64(master_seed ^ 0xF10FULL);
  std::vector<double> direct(static_cast<std::size_t>(outer)), nested(direct.size());
  parallel_for(outer, threads, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    TerminalObserver a;
    detail::integrate_path(rho0.matrix(), model, nullptr, full, trajectory_seed(master_seed, k), a);
    direct[k] = g(a.last);

    TerminalObserver mid;
    detail::integrate_path(rho0.matrix(), model, nullptr, first, trajectory_seed(restart_master, k), mid);
    const std::uint64_t inner_master = splitmix64(restart_master + k);
    double s = 0.0;
    for (int j = 0; j < inner; ++j) {
      TerminalObserver end;
      detail::integrate_path(mid.last, model, nullptr, second, trajectory_seed(inner_master, static_cast<std::uint64_t>(j)), end);
      s += g(end.last);
    }
    nested[k] = s / inner;
  });
  FlowPropertyReport rep;
  const MeanSe d = mean_se(direct), n = mean_se(nested);
  rep.full_mean = d.mean;
  rep.full_se = d.se;
  rep.restarted_mean = n.mean;
  rep.restarted_se = n.se;
  return rep;
}

}  // namespace qfl
