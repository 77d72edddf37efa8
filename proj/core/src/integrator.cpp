#include "qfl/integrator.hpp"

#include <cmath>
#include <string>

#include "qfl/noise.hpp"
#include "qfl/superoperators.hpp"
#include "sme_kernel.hpp"

namespace qfl {

ControlPolicy constant_controls(std::vector<double> values) {
  return [values = std::move(values)](StateView, double, std::span<double> out) {
    if (out.size() != values.size()) throw DimensionError("constant_controls: control count mismatch");
    std::copy(values.begin(), values.end(), out.begin());
  };
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(horizon > t0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must exceed t0");
  if (dt > horizon - t0 + 1e-12) throw InvalidArgument("dt must not exceed the horizon");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (blowup_threshold < 0.0) throw InvalidArgument("blowup_threshold must be >= 0");
}

long IntegratorConfig::steps() const { return std::max(1L, std::lround((horizon - t0) / dt)); }

bool IntegratorConfig::is_record_step(long n) const { return n % record_every == 0 || n == steps(); }

std::vector<double> IntegratorConfig::record_times() const {
  std::vector<double> out;
  const long n = steps();
  out.reserve(static_cast<std::size_t>(n / record_every + 2));
  for (long i = 0; i <= n; ++i) {
    if (is_record_step(i)) out.push_back(t0 + static_cast<double>(i) * dt);
  }
  return out;
}

double default_blowup_threshold(const SdeModel& model, double dt) {
  double s = 0.0;
  for (const auto& l : model.couplings) {
    const double n = operator_norm(l);
    s += n * n;
  }
  return std::max(1e-4, 50.0 * dt * s);
}

namespace {

template <int Dim>
detail::PathStats run_path(const ComplexMatrix& rho0, const SdeModel& model, const ControlPolicy& policy,
                           const IntegratorConfig& cfg, std::uint64_t seed, detail::PathObserver& obs) {
  using Kernel = detail::SmeKernel<Dim>;
  Kernel kernel(model);
  typename Kernel::Mat rho = rho0;
  const std::size_t nc = model.channels();
  const std::size_t nu = model.controls();
  std::vector<double> controls(nu, 0.0), dw(nc, 0.0), meas(nc, 0.0), y(nc, 0.0);
  WienerIncrements noise(seed, nc, cfg.dt);
  const double threshold =
      cfg.blowup_threshold > 0.0 ? cfg.blowup_threshold : default_blowup_threshold(model, cfg.dt);
  const long steps = cfg.steps();

  detail::PathStats stats;
  std::size_t k = 0;
  obs.on_record(k++, cfg.t0, rho, y);
  for (long n = 0; n < steps; ++n) {
    const double t = cfg.t0 + static_cast<double>(n) * cfg.dt;
    if (policy) policy(rho, t, controls);
    noise.draw(dw);
    const StepStats s = kernel.step(rho, controls, dw, cfg.dt, t, cfg.repair_positivity, threshold, meas.data());
    if (s.clipped) ++stats.repairs;
    for (std::size_t c = 0; c < nc; ++c) y[c] += dw[c] + meas[c] * cfg.dt;
    obs.on_step(n, controls, dw);
    if (cfg.is_record_step(n + 1)) obs.on_record(k++, t + cfg.dt, rho, y);
  }
  stats.steps = steps;
  return stats;
}

class RecordObserver : public detail::PathObserver {
 public:
  RecordObserver(TrajectoryRecord& rec, long steps, std::size_t nu, std::size_t nc, std::size_t nrec)
      : rec_(rec) {
    rec_.controls.setZero(steps, static_cast<Eigen::Index>(nu));
    rec_.innovations.setZero(steps, static_cast<Eigen::Index>(nc));
    rec_.records.setZero(static_cast<Eigen::Index>(nrec), static_cast<Eigen::Index>(nc));
    rec_.states.reserve(nrec);
  }

  void on_record(std::size_t k, double, StateView rho, std::span<const double> y) override {
    rec_.states.push_back(DensityOperator::trusted(rho));
    for (std::size_t c = 0; c < y.size(); ++c) rec_.records(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = y[c];
  }

  void on_step(long n, std::span<const double> u, std::span<const double> dw) override {
    for (std::size_t c = 0; c < u.size(); ++c) rec_.controls(n, static_cast<Eigen::Index>(c)) = u[c];
    for (std::size_t c = 0; c < dw.size(); ++c) rec_.innovations(n, static_cast<Eigen::Index>(c)) = dw[c];
  }

 private:
  TrajectoryRecord& rec_;
};

}  // namespace

namespace detail {

PathStats integrate_path(const ComplexMatrix& rho0, const SdeModel& model, const ControlPolicy& policy,
                         const IntegratorConfig& cfg, std::uint64_t seed, PathObserver& observer) {
  require_same_dim(rho0, model.hamiltonian, "integrate_path");
  switch (model.dim()) {
    case 2:
      return run_path<2>(rho0, model, policy, cfg, seed, observer);
    case 4:
      return run_path<4>(rho0, model, policy, cfg, seed, observer);
    default:
      return run_path<Eigen::Dynamic>(rho0, model, policy, cfg, seed, observer);
  }
}

}  // namespace detail

DensityOperator sme_step(const DensityOperator& rho, const SdeModel& model, std::span<const double> controls,
                         std::span<const double> dw, double dt, double t, bool repair, double blowup_threshold,
                         StepStats* stats) {
  model.validate();
  require_same_dim(rho.matrix(), model.hamiltonian, "sme_step");
  if (controls.size() != model.controls()) throw DimensionError("sme_step: control count mismatch");
  if (dw.size() != model.channels()) throw DimensionError("sme_step: noise channel count mismatch");
  if (!(dt > 0.0)) throw InvalidArgument("sme_step: dt must be positive");
  detail::SmeKernel<Eigen::Dynamic> kernel(model);
  ComplexMatrix m = rho.matrix();
  std::vector<double> meas(model.channels());
  const double threshold = blowup_threshold > 0.0 ? blowup_threshold : default_blowup_threshold(model, dt);
  const StepStats s = kernel.step(m, controls, dw, dt, t, repair, threshold, meas.data());
  if (stats) *stats = s;
  return DensityOperator::trusted(std::move(m));
}

TrajectoryRecord simulate_trajectory(const DensityOperator& rho0, const SdeModel& model,
                                     const ControlPolicy& policy, const IntegratorConfig& cfg) {
  model.validate();
  cfg.validate();
  TrajectoryRecord rec;
  rec.times = cfg.record_times();
  RecordObserver obs(rec, cfg.steps(), model.controls(), model.channels(), rec.times.size());
  const detail::PathStats stats = detail::integrate_path(rho0.matrix(), model, policy, cfg, cfg.seed, obs);
  rec.steps = stats.steps;
  rec.repairs = stats.repairs;
  return rec;
}

LindbladPath lindblad_ode(const DensityOperator& rho0, const SdeModel& model, const ControlPath& controls,
                          const IntegratorConfig& cfg) {
  model.validate();
  cfg.validate();
  require_same_dim(rho0.matrix(), model.hamiltonian, "lindblad_ode");
  std::vector<double> u(model.controls(), 0.0);
  auto rhs = [&](const ComplexMatrix& r, double t) {
    if (controls) controls(t, u);
    return lindbladian(r, model, u, t);
  };
  LindbladPath out;
  out.times = cfg.record_times();
  ComplexMatrix rho = rho0.matrix();
  out.states.push_back(rho0);
  const double h = cfg.dt;
  for (long n = 0; n < cfg.steps(); ++n) {
    const double t = cfg.t0 + static_cast<double>(n) * h;
    // hook and controls are piecewise constant on the step; sample at its left end
    const double tl = t;
    const ComplexMatrix k1 = rhs(rho, tl);
    const ComplexMatrix k2 = rhs(rho + 0.5 * h * k1, tl);
    const ComplexMatrix k3 = rhs(rho + 0.5 * h * k2, tl);
    const ComplexMatrix k4 = rhs(rho + h * k3, tl);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = hermitian_part(rho);
    if (cfg.is_record_step(n + 1)) out.states.push_back(DensityOperator::trusted(rho));
  }
  return out;
}

}  // namespace qfl
