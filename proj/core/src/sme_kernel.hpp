#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qfl/errors.hpp"
#include "qfl/integrator.hpp"

namespace qfl::detail {

template <int Dim>
class SmeKernel {
 public:
  using Mat = Eigen::Matrix<Complex, Dim, Dim>;

  explicit SmeKernel(const SdeModel& model) : hook_(model.mean_field.get()) {
    const int d = model.dim();
    h_ = model.hamiltonian;
    ldl_ = Mat::Zero(d, d);
    for (const auto& l : model.couplings) {
      l_.emplace_back(l);
      ldag_.emplace_back(l.adjoint());
      ldl_ += l.adjoint() * l;
    }
    for (const auto& c : model.control_ops) hc_.emplace_back(c);
    diagonal_ = is_diagonal(model.hamiltonian) && (!hook_ || hook_diagonal(*hook_));
    for (const auto& l : model.couplings) diagonal_ = diagonal_ && is_diagonal(l);
    if (diagonal_) {
      const auto nc = static_cast<Eigen::Index>(model.couplings.size());
      ldiag_.resize(d, nc);
      for (Eigen::Index k = 0; k < nc; ++k) ldiag_.col(k) = model.couplings[static_cast<std::size_t>(k)].diagonal();
      hdiag_ = model.hamiltonian.diagonal().real();
      dis_ = Mat::Zero(d, d);
      const auto s2 = ldiag_.cwiseAbs2().rowwise().sum().eval();
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
          dis_(i, j) = (ldiag_.row(i).array() * ldiag_.row(j).array().conjugate()).sum() - 0.5 * (s2(i) + s2(j));
      a_.resize(d);
      h_now_.resize(d);
    }
    heff_ = Mat::Zero(d, d);
    tmp_ = Mat::Zero(d, d);
    lr_ = Mat::Zero(d, d);
    next_ = Mat::Zero(d, d);
  }

  // In place; meas[k] receives tr((L_k + L_k^dagger) rho) of the incoming state.
  StepStats step(Mat& rho, std::span<const double> controls, std::span<const double> dw, double dt, double t,
                 bool clip, double threshold, double* meas) {
    if constexpr (Dim == 2) {
      if (diagonal_) {
        qubit_diagonal_update(rho, controls, dw, dt, t, meas);
        return finish(rho, t, clip, threshold);
      }
    }
    if (diagonal_) {
      diagonal_update(rho, controls, dw, dt, t, meas);
    } else {
      dense_update(rho, controls, dw, dt, t, meas);
    }
    return finish(rho, t, clip, threshold);
  }

  bool diagonal() const { return diagonal_; }

 private:
  static bool hook_diagonal(const MeanFieldHook& hook) {
    for (std::size_t k = 0; k < hook.size(); ++k) {
      if (!is_diagonal(hook.at_index(k))) return false;
    }
    return true;
  }

  // rho'_ij = rho_ij (1 + F_ij dt + a_i + conj(a_j) - c), exact mirror of the
  // dense update when H and every L are diagonal
  void diagonal_update(Mat& rho, std::span<const double> controls, std::span<const double> dw, double dt, double t,
                       double* meas) {
    const int d = static_cast<int>(rho.rows());
    h_now_ = hdiag_;
    if (hook_) h_now_ += hook_->at(t).diagonal().real();
    double c = 0.0;
    a_.setZero();
    for (Eigen::Index k = 0; k < ldiag_.cols(); ++k) {
      double m = 0.0;
      for (int i = 0; i < d; ++i) m += 2.0 * ldiag_(i, k).real() * rho(i, i).real();
      meas[k] = m;
      c += m * dw[static_cast<std::size_t>(k)];
      a_ += dw[static_cast<std::size_t>(k)] * ldiag_.col(k);
    }
    const Complex base = 1.0 - c;
    for (int j = 0; j < d; ++j) {
      const Complex bj = std::conj(a_(j));
      for (int i = 0; i <= j; ++i) {
        const Complex f = dt * (dis_(i, j) + Complex(0.0, h_now_(j) - h_now_(i)));
        next_(i, j) = rho(i, j) * (base + f + a_(i) + bj);
      }
    }
    for (std::size_t k = 0; k < hc_.size(); ++k) {
      if (controls[k] == 0.0) continue;
      tmp_.noalias() = hc_[k] * rho;
      next_ += Complex(0.0, -controls[k] * dt) * (tmp_ - tmp_.adjoint());
    }
    for (int j = 0; j < d; ++j) {
      next_(j, j) = next_(j, j).real();
      for (int i = 0; i < j; ++i) next_(j, i) = std::conj(next_(i, j));
    }
    rho = next_;
  }

  void qubit_diagonal_update(Mat& rho, std::span<const double> controls, std::span<const double> dw, double dt,
                             double t, double* meas) {
    double dh = hdiag_(1) - hdiag_(0);
    if (hook_) {
      const auto& hk = hook_->at(t);
      dh += hk(1, 1).real() - hk(0, 0).real();
    }
    const double p = rho(0, 0).real();
    const double q = rho(1, 1).real();
    const Complex r = rho(0, 1);
    double c = 0.0;
    Complex a0 = 0.0;
    Complex a1 = 0.0;
    const auto nc = ldiag_.cols();
    for (Eigen::Index k = 0; k < nc; ++k) {
      const Complex l0 = ldiag_(0, k);
      const Complex l1 = ldiag_(1, k);
      const double m = 2.0 * (l0.real() * p + l1.real() * q);
      const double w = dw[static_cast<std::size_t>(k)];
      meas[k] = m;
      c += m * w;
      a0 += w * l0;
      a1 += w * l1;
    }
    const double base = 1.0 - c;
    const double p1 = p * (base + dt * dis_(0, 0).real() + 2.0 * a0.real());
    const double q1 = q * (base + dt * dis_(1, 1).real() + 2.0 * a1.real());
    Complex r1 = r * (base + dt * (dis_(0, 1) + Complex(0.0, dh)) + a0 + std::conj(a1));
    double dp = 0.0;
    for (std::size_t k = 0; k < hc_.size(); ++k) {
      const double u = controls[k];
      if (u == 0.0) continue;
      // -i u dt [Hc, rho] for Hermitian 2x2 Hc
      const Mat& h = hc_[k];
      const Complex g = h(0, 1) * std::conj(r);
      dp += 2.0 * u * dt * g.imag();
      r1 += Complex(0.0, -u * dt) * (h(0, 0) * r + h(0, 1) * q - p * h(0, 1) - r * h(1, 1));
    }
    rho(0, 0) = p1 + dp;
    rho(1, 1) = q1 - dp;
    rho(0, 1) = r1;
    rho(1, 0) = std::conj(r1);
  }

  void dense_update(Mat& rho, std::span<const double> controls, std::span<const double> dw, double dt, double t,
                    double* meas) {
    heff_ = h_;
    for (std::size_t k = 0; k < hc_.size(); ++k) {
      if (controls[k] != 0.0) heff_ += controls[k] * hc_[k];
    }
    if (hook_) heff_ += hook_->at(t);

    next_ = rho;
    // rho H = (H rho)^dagger for Hermitian rho, H
    tmp_.noalias() = heff_ * rho;
    next_ += Complex(0.0, -dt) * (tmp_ - tmp_.adjoint());
    tmp_.noalias() = ldl_ * rho;
    next_ -= (0.5 * dt) * (tmp_ + tmp_.adjoint());
    for (std::size_t k = 0; k < l_.size(); ++k) {
      lr_.noalias() = l_[k] * rho;
      const double m = 2.0 * lr_.trace().real();
      meas[k] = m;
      tmp_.noalias() = lr_ * ldag_[k];
      next_ += dt * tmp_;
      next_ += dw[k] * (lr_ + lr_.adjoint() - m * rho);
    }
    rho = 0.5 * (next_ + next_.adjoint());
  }

  StepStats finish(Mat& rho, double t, bool clip, double threshold) {
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || tr <= 0.0) {
      throw IntegrationBlowup("state trace became " + std::to_string(tr) + " at t=" + std::to_string(t) +
                                  "; reduce dt",
                              t, -INFINITY);
    }
    scale(rho, 1.0 / tr);

    StepStats stats;
    if (!clip) return stats;
    stats.min_eigenvalue = min_eig(rho);
    if (stats.min_eigenvalue < -threshold) {
      throw IntegrationBlowup("min eigenvalue " + std::to_string(stats.min_eigenvalue) + " at t=" +
                                  std::to_string(t) + " exceeds repair tolerance; reduce dt",
                              t, stats.min_eigenvalue);
    }
    if (stats.min_eigenvalue < 0.0) {
      clip_negative(rho);
      stats.clipped = true;
    }
    return stats;
  }

 public:
  // Eigen's complex-by-real scaling goes through the complex product
  static void scale(Mat& m, double s) {
    double* d = reinterpret_cast<double*>(m.data());
    const Eigen::Index n = 2 * m.size();
    for (Eigen::Index j = 0; j < n; ++j) d[j] *= s;
  }

  static double min_eig(const Mat& rho) {
    if constexpr (Dim == 2) {
      const double p = 0.5 * (rho(0, 0).real() + rho(1, 1).real());
      const double q = 0.5 * (rho(0, 0).real() - rho(1, 1).real());
      return p - std::sqrt(q * q + std::norm(rho(1, 0)));
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
      return es.eigenvalues()(0);
    }
  }

  static void clip_negative(Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    auto lam = es.eigenvalues().cwiseMax(0.0).eval();
    lam /= lam.sum();
    rho = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    Mat sym = 0.5 * (rho + rho.adjoint());
    rho = sym;
  }

 private:
  const MeanFieldHook* hook_;
  bool diagonal_ = false;
  Eigen::Matrix<Complex, Dim, Eigen::Dynamic> ldiag_;
  Eigen::Matrix<double, Dim, 1> hdiag_;
  Eigen::Matrix<double, Dim, 1> h_now_;
  Eigen::Matrix<Complex, Dim, 1> a_;
  Mat dis_;
  Mat h_;
  Mat ldl_;
  std::vector<Mat> l_;
  std::vector<Mat> ldag_;
  std::vector<Mat> hc_;
  Mat heff_;
  Mat tmp_;
  Mat lr_;
  Mat next_;
};

// Receives the recorded grid points of one path.
class PathObserver {
 public:
  virtual ~PathObserver() = default;
  virtual void on_record(std::size_t k, double t, StateView rho, std::span<const double> y) = 0;
  virtual void on_step(long, std::span<const double>, std::span<const double>) {}
};

struct PathStats {
  long steps = 0;
  long repairs = 0;
};

PathStats integrate_path(const ComplexMatrix& rho0, const SdeModel& model, const ControlPolicy& policy,
                         const IntegratorConfig& cfg, std::uint64_t seed, PathObserver& observer);

}  // namespace qfl::detail
