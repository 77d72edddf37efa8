#include "qfl/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"

namespace qfl {

namespace {

void check_gains(double k1, double k2, double alpha_max) {
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw InvalidArgument("feedback gains must be non-negative");
  if (!(alpha_max > 0.0)) throw InvalidArgument("alpha_max must be positive");
}

// tr(a b) without forming the product
Complex trace_product(StateView a, const ComplexMatrix& b) {
  Complex s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += a(i, j) * b(j, i);
  return s;
}

// tr([D, gamma] P) = tr(gamma [P, D]), so q = [P, D] is precomputed
Complex evaluate(StateView gamma, const ComplexMatrix& target, const ComplexMatrix& q, double stab, double comm) {
  Complex v = stab * (1.0 - trace_product(gamma, target));
  if (comm != 0.0) v += -kImag * comm * trace_product(gamma, q);
  return v;
}

}  // namespace

FeedbackLaw::FeedbackLaw(Kind kind, DensityOperator target, ComplexMatrix direction, double k1, double k2,
                         double alpha_max)
    : kind_(kind),
      target_(std::move(target)),
      direction_(std::move(direction)),
      k1_(k1),
      k2_(k2),
      alpha_max_(alpha_max),
      stab_gain_(0.0),
      comm_gain_(0.0),
      q_(target_.matrix() * direction_ - direction_ * target_.matrix()) {
  switch (kind_) {
    case Kind::zero:
      break;
    case Kind::mean_field_stabilizer:
      stab_gain_ = k1;
      comm_gain_ = k2;
      break;
    case Kind::local_stabilizer:
      comm_gain_ = k1;
      stab_gain_ = k2;
      break;
  }
}

FeedbackLaw FeedbackLaw::zero() {
  return FeedbackLaw(Kind::zero, states::ground(), pauli::y(), 0.0, 0.0, 1.0);
}

FeedbackLaw FeedbackLaw::mean_field_stabilizer(const DensityOperator& target, double k1, double k2,
                                               double alpha_max) {
  check_gains(k1, k2, alpha_max);
  if (target.dim() != 2) throw DimensionError("mean_field_stabilizer: target must be a qubit state");
  return FeedbackLaw(Kind::mean_field_stabilizer, target, pauli::y(), k1, k2, alpha_max);
}

FeedbackLaw FeedbackLaw::local_stabilizer(const DensityOperator& target, double k1, double k2, double alpha_max) {
  check_gains(k1, k2, alpha_max);
  if (target.dim() != 2) throw DimensionError("local_stabilizer: target must be a qubit state");
  return FeedbackLaw(Kind::local_stabilizer, target, pauli::x(), k1, k2, alpha_max);
}

Complex FeedbackLaw::raw(StateView gamma) const {
  if (kind_ == Kind::zero) return 0.0;
  if (gamma.rows() != 2 || gamma.cols() != 2) {
    throw DimensionError("feedback law expects a qubit state, got dim " + std::to_string(gamma.rows()));
  }
  return evaluate(gamma, target_.matrix(), q_, stab_gain_, comm_gain_);
}

double FeedbackLaw::operator()(StateView gamma) const {
  if (kind_ == Kind::zero) return 0.0;
  return std::clamp(raw(gamma).real(), -alpha_max_, alpha_max_);
}

bool FeedbackLaw::clips(StateView gamma) const { return std::abs(raw(gamma).real()) > alpha_max_; }

ControlPolicy FeedbackLaw::policy() const {
  return [law = *this](StateView gamma, double, std::span<double> u) {
    if (u.size() != 1) throw DimensionError("feedback policy drives exactly one control");
    u[0] = law(gamma);
  };
}

double meanfield_feedback(const DensityOperator& gamma, const FeedbackLaw& law) {
  if (gamma.dim() != 2) throw DimensionError("meanfield_feedback: expected a qubit state");
  return law(gamma.matrix());
}

TwoQubitLaws twoqubit_laws(double k1, double k2, double alpha_max) {
  return {FeedbackLaw::local_stabilizer(states::ground(), k1, k2, alpha_max),
          FeedbackLaw::local_stabilizer(states::excited(), k1, k2, alpha_max)};
}

std::pair<double, double> twoqubit_feedbacks(const DensityOperator& rho, const TwoQubitLaws& laws) {
  if (rho.dim() != 4) throw DimensionError("twoqubit_feedbacks: expected a two-qubit state");
  auto global = [&](const FeedbackLaw& law, int site, double stab, double comm) {
    if (law.kind() == FeedbackLaw::Kind::zero) return 0.0;
    const ComplexMatrix p = embed_site(law.target().matrix(), site, 2);
    const ComplexMatrix d = embed_site(law.direction(), site, 2);
    const double v = evaluate(rho.matrix(), p, ComplexMatrix(p * d - d * p), stab, comm).real();
    return std::clamp(v, -law.alpha_max(), law.alpha_max());
  };
  auto gains = [](const FeedbackLaw& law) {
    return law.kind() == FeedbackLaw::Kind::local_stabilizer ? std::pair{law.kappa2(), law.kappa1()}
                                                             : std::pair{law.kappa1(), law.kappa2()};
  };
  const auto [sa, ca] = gains(laws.alice);
  const auto [sb, cb] = gains(laws.bob);
  return {global(laws.alice, 1, sa, ca), global(laws.bob, 2, sb, cb)};
}

std::pair<double, double> twoqubit_feedbacks(const DensityOperator& rho_a, const DensityOperator& rho_b,
                                             const TwoQubitLaws& laws) {
  if (rho_a.dim() != 2 || rho_b.dim() != 2) throw DimensionError("twoqubit_feedbacks: expected qubit marginals");
  return {laws.alice(rho_a.matrix()), laws.bob(rho_b.matrix())};
}

}  // namespace qfl
