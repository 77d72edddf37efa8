#include "qfl/nbody_engine.hpp"

#include <cmath>
#include <string>

#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"
#include "qfl/noise.hpp"
#include "sme_kernel.hpp"

namespace qfl {

namespace {

// Entrywise Euler-Maruyama for diagonal H and L_l:
//   rho'_ij = rho_ij (1 + F_ij dt + a_i + conj(a_j) - c) + control terms
// with a_i = sum_l d_il dW_l and c = sum_l tr((L_l + L_l^dagger) rho) dW_l.
// Only the lower triangle is advanced; mirror() restores the upper one.
class DiagonalKernel {
 public:
  DiagonalKernel(const NBodyModel& model, double dt) : n_(model.sites()), dim_(model.dim()), dt_(dt) {
    const ComplexMatrix& d = model.coupling_diagonals();
    const Eigen::VectorXd& h = model.hamiltonian_diagonal();
    d_ = d;
    re2_ = 2.0 * d.real();
    fdt_.resize(dim_, dim_);
    Eigen::VectorXd s = d.cwiseAbs2().rowwise().sum();
    for (int j = 0; j < dim_; ++j) {
      for (int i = j; i < dim_; ++i) {
        const Complex cross = (d.row(i).array() * d.row(j).array().conjugate()).sum();
        fdt_(i, j) = dt * (Complex(0.0, -(h(i) - h(j))) + cross - 0.5 * (s(i) + s(j)));
      }
    }
    ctrl_ = model.components().control_op;
    a_.resize(dim_);
    next_.resize(dim_, dim_);
  }

  // rho must be fully populated when any control is nonzero
  StepStats step(ComplexMatrix& rho, std::span<const double> u, std::span<const double> dw, double t, bool clip,
                 double threshold, double* meas) {
    double c = 0.0;
    for (int l = 0; l < n_; ++l) {
      double m = 0.0;
      for (int i = 0; i < dim_; ++i) m += re2_(i, l) * rho(i, i).real();
      meas[l] = m;
      c += m * dw[static_cast<std::size_t>(l)];
    }
    const Eigen::Map<const Eigen::VectorXd> w(dw.data(), n_);
    a_.noalias() = d_ * w.cast<Complex>();
    const Complex base = 1.0 - c;
    bool controlled = false;
    for (int l = 0; l < n_; ++l) controlled = controlled || u[static_cast<std::size_t>(l)] != 0.0;

    if (!controlled) {
      double tr = 0.0;
      for (int i = 0; i < dim_; ++i) tr += rho(i, i).real() * (fdt_(i, i).real() + base.real() + 2.0 * a_(i).real());
      check_trace(tr, t);
      const double inv = 1.0 / tr;
      for (int j = 0; j < dim_; ++j) {
        const Complex bj = inv * (base + std::conj(a_(j)));
        const Complex* f = fdt_.col(j).data();
        const Complex* a = a_.data();
        Complex* r = rho.col(j).data();
        r[j] = r[j].real() * (inv * (f[j].real() + base.real() + 2.0 * a[j].real()));
        for (int i = j + 1; i < dim_; ++i) r[i] *= inv * (f[i] + a[i]) + bj;
      }
    } else {
      for (int j = 0; j < dim_; ++j) {
        const Complex bj = base + std::conj(a_(j));
        for (int i = j; i < dim_; ++i) next_(i, j) = rho(i, j) * (fdt_(i, j) + a_(i) + bj);
      }
      for (int l = 0; l < n_; ++l) {
        const double alpha = u[static_cast<std::size_t>(l)];
        if (alpha != 0.0) add_control(rho, l + 1, alpha);
      }
      double tr = 0.0;
      for (int j = 0; j < dim_; ++j) {
        next_(j, j) = next_(j, j).real();
        tr += next_(j, j).real();
      }
      check_trace(tr, t);
      const double inv = 1.0 / tr;
      for (int j = 0; j < dim_; ++j) {
        Complex* r = next_.col(j).data();
        for (int i = j; i < dim_; ++i) r[i] *= inv;
      }
      rho.swap(next_);
    }

    StepStats stats;
    if (!clip) return stats;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    stats.min_eigenvalue = es.eigenvalues()(0);
    if (stats.min_eigenvalue < -threshold) {
      throw IntegrationBlowup("min eigenvalue " + std::to_string(stats.min_eigenvalue) + " exceeds repair tolerance; reduce dt",
                              t, stats.min_eigenvalue);
    }
    if (stats.min_eigenvalue < 0.0) {
      mirror(rho);
      detail::SmeKernel<Eigen::Dynamic>::clip_negative(rho);
      stats.clipped = true;
    }
    return stats;
  }

  static void mirror(ComplexMatrix& rho) {
    const auto d = rho.rows();
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) rho(i, j) = std::conj(rho(j, i));
    }
  }

 private:
  static void check_trace(double tr, double t) {
    if (!std::isfinite(tr) || tr <= 0.0) {
      throw IntegrationBlowup("state trace became " + std::to_string(tr) + "; reduce dt", t, -INFINITY);
    }
  }

  // next += -i alpha dt (M - M^dagger), M = O_l rho, lower triangle only
  void add_control(const ComplexMatrix& rho, int site, double alpha) {
    const int shift = n_ - site;
    const int mask = 1 << shift;
    const Complex f(0.0, -alpha * dt_);
    auto m = [&](int i, int j) {
      const int b = (i >> shift) & 1;
      const int i0 = i & ~mask;
      return ctrl_(b, 0) * rho(i0, j) + ctrl_(b, 1) * rho(i0 | mask, j);
    };
    for (int j = 0; j < dim_; ++j) {
      for (int i = j; i < dim_; ++i) next_(i, j) += f * (m(i, j) - std::conj(m(j, i)));
    }
  }

  int n_;
  int dim_;
  double dt_;
  ComplexMatrix d_;
  Eigen::MatrixXd re2_;
  ComplexMatrix fdt_;
  ComplexMatrix ctrl_;
  Eigen::VectorXcd a_;
  ComplexMatrix next_;
};

double nbody_threshold(const NBodyModel& model, const IntegratorConfig& cfg) {
  if (cfg.blowup_threshold > 0.0) return cfg.blowup_threshold;
  const double l = operator_norm(model.components().coupling);
  return std::max(1e-4, 50.0 * cfg.dt * model.sites() * l * l);
}

detail::PathStats run_diagonal(const ComplexMatrix& rho0, const NBodyModel& model, const ControlPolicy& policy,
                               const IntegratorConfig& cfg, std::uint64_t seed, detail::PathObserver& obs) {
  DiagonalKernel kernel(model, cfg.dt);
  const auto n = static_cast<std::size_t>(model.sites());
  ComplexMatrix rho = rho0;
  std::vector<double> u(n, 0.0), dw(n, 0.0), meas(n, 0.0), y(n, 0.0);
  WienerIncrements noise(seed, n, cfg.dt);
  const double threshold = nbody_threshold(model, cfg);
  detail::PathStats stats;
  std::size_t k = 0;
  obs.on_record(k++, cfg.t0, rho, y);
  const long steps = cfg.steps();
  for (long s = 0; s < steps; ++s) {
    const double t = cfg.t0 + static_cast<double>(s) * cfg.dt;
    if (policy) {
      DiagonalKernel::mirror(rho);
      policy(rho, t, u);
    }
    noise.draw(dw);
    if (kernel.step(rho, u, dw, t, cfg.repair_positivity, threshold, meas.data()).clipped) ++stats.repairs;
    for (std::size_t c = 0; c < n; ++c) y[c] += dw[c] + meas[c] * cfg.dt;
    obs.on_step(s, u, dw);
    if (cfg.is_record_step(s + 1)) {
      DiagonalKernel::mirror(rho);
      obs.on_record(k++, t + cfg.dt, rho, y);
    }
  }
  stats.steps = steps;
  return stats;
}

detail::PathStats run_nbody(const ComplexMatrix& rho0, const NBodyModel& model, const ControlPolicy& policy,
                            const IntegratorConfig& cfg, std::uint64_t seed, detail::PathObserver& obs) {
  if (rho0.rows() != model.dim()) {
    throw DimensionError("N-body state has dim " + std::to_string(rho0.rows()) + ", model needs " +
                         std::to_string(model.dim()));
  }
  if (model.diagonal()) return run_diagonal(rho0, model, policy, cfg, seed, obs);
  IntegratorConfig c = cfg;
  if (c.blowup_threshold <= 0.0) c.blowup_threshold = nbody_threshold(model, cfg);
  return detail::integrate_path(rho0, model.as_sde_model(), policy, c, seed, obs);
}

class RecordObserver : public detail::PathObserver {
 public:
  explicit RecordObserver(TrajectoryRecord& rec) : rec_(rec) {}
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

class SinkObserver : public detail::PathObserver {
 public:
  explicit SinkObserver(const RecordSink& sink) : sink_(sink) {}
  void on_record(std::size_t k, double, StateView rho, std::span<const double>) override { sink_(k, rho); }

 private:
  const RecordSink& sink_;
};

}  // namespace

DensityOperator nbody_sme_step(const DensityOperator& rho, const NBodyModel& model, std::span<const double> controls,
                               std::span<const double> dw, double dt, bool repair, double t, StepStats* stats) {
  const auto n = static_cast<std::size_t>(model.sites());
  if (rho.dim() != model.dim()) throw DimensionError("nbody_sme_step: state dimension mismatch");
  if (controls.size() != n || dw.size() != n) throw DimensionError("nbody_sme_step: expected one control and one dW per site");
  IntegratorConfig cfg;
  cfg.dt = dt;
  const double threshold = nbody_threshold(model, cfg);
  ComplexMatrix m = rho.matrix();
  std::vector<double> meas(n);
  StepStats s;
  if (model.diagonal()) {
    DiagonalKernel kernel(model, dt);
    s = kernel.step(m, controls, dw, t, repair, threshold, meas.data());
    DiagonalKernel::mirror(m);
  } else {
    detail::SmeKernel<Eigen::Dynamic> kernel(model.as_sde_model());
    s = kernel.step(m, controls, dw, dt, t, repair, threshold, meas.data());
  }
  if (stats) *stats = s;
  return DensityOperator::trusted(std::move(m));
}

ControlPolicy site_feedback_policy(std::vector<FeedbackLaw> laws) {
  return [laws = std::move(laws)](StateView rho, double, std::span<double> u) {
    if (u.size() != laws.size()) throw DimensionError("site_feedback_policy: one law per site required");
    const int n = static_cast<int>(laws.size());
    for (int l = 0; l < n; ++l) {
      const FeedbackLaw& law = laws[static_cast<std::size_t>(l)];
      u[static_cast<std::size_t>(l)] =
          law.kind() == FeedbackLaw::Kind::zero ? 0.0 : law(partial_trace(rho, l + 1, n));
    }
  };
}

TrajectoryRecord nbody_simulate(const DensityOperator& rho0, const NBodyModel& model, const ControlPolicy& policy,
                                const IntegratorConfig& cfg) {
  cfg.validate();
  TrajectoryRecord rec;
  rec.times = cfg.record_times();
  const auto n = model.sites();
  rec.controls.setZero(cfg.steps(), n);
  rec.innovations.setZero(cfg.steps(), n);
  rec.records.setZero(static_cast<Eigen::Index>(rec.times.size()), n);
  RecordObserver obs(rec);
  const detail::PathStats s = run_nbody(rho0.matrix(), model, policy, cfg, cfg.seed, obs);
  rec.steps = s.steps;
  rec.repairs = s.repairs;
  return rec;
}

EnsembleSummary nbody_ensemble(const DensityOperator& rho0, const NBodyModel& model, const ControlPolicy& policy,
                               const IntegratorConfig& cfg, const EnsembleConfig& ens) {
  cfg.validate();
  const PathRunner runner = [&](std::uint64_t seed, const RecordSink& sink) {
    SinkObserver obs(sink);
    const detail::PathStats s = run_nbody(rho0.matrix(), model, policy, cfg, seed, obs);
    return PathOutcome{s.steps, s.repairs};
  };
  return run_ensemble(cfg.record_times(), ens, runner);
}

}  // namespace qfl
