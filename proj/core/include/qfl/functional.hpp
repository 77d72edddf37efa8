#pragma once

#include <functional>

#include "qfl/density.hpp"

namespace qfl {

// G(rho) = offset + Re<F, rho> + Re<rho, C1 rho>, or an arbitrary evaluator.
class Functional {
 public:
  enum class Kind { constant, linear, quadratic, custom };

  static Functional constant(double value);
  static Functional linear(ComplexMatrix f, double offset = 0.0);
  /// Re<rho, C1 rho> plus an optional linear part.
  static Functional quadratic(ComplexMatrix c1, ComplexMatrix f = {}, double offset = 0.0);
  /// Evaluated on raw matrices, so it must tolerate small excursions from
  /// the density set (finite differences step off it).
  static Functional custom(std::function<double(const ComplexMatrix&)> fn);

  Kind kind() const { return kind_; }
  double offset() const { return offset_; }
  const ComplexMatrix& linear_part() const { return f_; }
  const ComplexMatrix& quadratic_part() const { return c1_; }

  double operator()(const ComplexMatrix& rho) const;
  double operator()(const DensityOperator& rho) const { return (*this)(rho.matrix()); }

  /// Hermitian Riesz representative of the derivative at rho: DG[rho](tau) =
  /// Re<tau, gradient(rho)> for Hermitian tau. Not available for custom kinds.
  ComplexMatrix gradient(const ComplexMatrix& rho) const;
  /// Re<tau, C1 tau> + Re<tau, C1^dagger tau>: D^2 G(tau, tau) for quadratic kinds.
  double second_derivative(const ComplexMatrix& tau) const;

 private:
  Functional() = default;

  Kind kind_ = Kind::constant;
  double offset_ = 0.0;
  ComplexMatrix f_;
  ComplexMatrix c1_;
  std::function<double(const ComplexMatrix&)> fn_;
};

}  // namespace qfl
