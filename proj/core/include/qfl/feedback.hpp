#pragma once

#include <utility>

#include "qfl/density.hpp"
#include "qfl/integrator.hpp"

namespace qfl {

// alpha(gamma) = k_stab (1 - tr(gamma target)) - i k_comm tr([D, gamma] target),
// clipped to [-alpha_max, alpha_max].
class FeedbackLaw {
 public:
  enum class Kind { zero, mean_field_stabilizer, local_stabilizer };

  static FeedbackLaw zero();
  /// k1 (1 - tr(gamma target)) - i k2 tr([sigma_y, gamma] target).
  static FeedbackLaw mean_field_stabilizer(const DensityOperator& target, double k1, double k2, double alpha_max);
  /// -i k1 tr([sigma_x, gamma] target) + k2 (1 - tr(gamma target)).
  static FeedbackLaw local_stabilizer(const DensityOperator& target, double k1, double k2, double alpha_max);

  Kind kind() const { return kind_; }
  const DensityOperator& target() const { return target_; }
  const ComplexMatrix& direction() const { return direction_; }
  double kappa1() const { return k1_; }
  double kappa2() const { return k2_; }
  double alpha_max() const { return alpha_max_; }

  /// Unclipped complex value; its imaginary part is rounding residue only.
  Complex raw(StateView gamma) const;
  double operator()(StateView gamma) const;
  bool clips(StateView gamma) const;

  /// Policy for a single-control model (the law applied to the full state).
  ControlPolicy policy() const;

 private:
  FeedbackLaw(Kind kind, DensityOperator target, ComplexMatrix direction, double k1, double k2, double alpha_max);

  Kind kind_;
  DensityOperator target_;
  ComplexMatrix direction_;
  double k1_;
  double k2_;
  double alpha_max_;
  double stab_gain_;
  double comm_gain_;
  ComplexMatrix q_;
};

/// The stabilizing law evaluated on a qubit state; throws on dim != 2.
double meanfield_feedback(const DensityOperator& gamma, const FeedbackLaw& law);

struct TwoQubitLaws {
  FeedbackLaw alice;
  FeedbackLaw bob;
};

/// Default game: Alice drives site 1 to rho_g, Bob drives site 2 to rho_e,
/// commutator gain k1, stabilizing gain k2.
TwoQubitLaws twoqubit_laws(double k1, double k2, double alpha_max);

/// Global form: each law applied with its operators embedded on its site.
std::pair<double, double> twoqubit_feedbacks(const DensityOperator& rho, const TwoQubitLaws& laws);
/// Reduced form on the partial traces.
std::pair<double, double> twoqubit_feedbacks(const DensityOperator& rho_a, const DensityOperator& rho_b,
                                             const TwoQubitLaws& laws);

}  // namespace qfl
