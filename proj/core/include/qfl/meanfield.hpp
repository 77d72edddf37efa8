#pragma once

#include <memory>
#include <vector>

#include "qfl/density.hpp"
#include "qfl/integrator.hpp"

namespace qfl {

// Kernel a(x,y;x',y') over a d-point alphabet, stored as a d^2 x d^2 matrix
// with row (x,y) -> x + d*y (0-based, first index fastest).
class TwoBodyKernel {
 public:
  /// Checks exchange and Hermitian symmetry entrywise to 1e-12.
  explicit TwoBodyKernel(ComplexMatrix values);

  int local_dim() const { return d_; }
  const ComplexMatrix& matrix() const { return a_; }
  /// 0-based entry a(x,y;x',y').
  Complex operator()(int x, int y, int xp, int yp) const { return a_(x + d_ * y, xp + d_ * yp); }

  static double exchange_defect(const ComplexMatrix& values);
  static double hermitian_defect(const ComplexMatrix& values);

 private:
  ComplexMatrix a_;
  int d_;
};

/// diag(1, -1, -1, 1): the sigma_z (x) sigma_z interaction.
TwoBodyKernel ising_kernel();

/// A^rho(x,x') = sum_{y,y'} a(x,y;x',y') conj(rho(y,y')).
ComplexMatrix meanfield_operator(const TwoBodyKernel& kernel, const ComplexMatrix& rho);
ComplexMatrix meanfield_operator(const TwoBodyKernel& kernel, const DensityOperator& rho);

// Deterministic path of states on the uniform grid t0 + k dt.
struct MeanFieldFlow {
  double t0 = 0.0;
  double dt = 1e-4;
  std::vector<DensityOperator> states;

  std::vector<double> times() const;
  /// Piecewise-constant lookup.
  const DensityOperator& at(double t) const;
  /// max_k ||xi_{k+1} - xi_k||_2 / dt.
  double continuity_constant() const;
  void validate() const;
};

/// rho0 held constant on every point of cfg's step grid.
MeanFieldFlow constant_flow(const DensityOperator& rho0, const IntegratorConfig& cfg);

/// sup_k ||a_k - b_k||_2; grids must match.
double sup_distance(const MeanFieldFlow& a, const MeanFieldFlow& b);

/// Hook carrying A^{xi(t)} for the frozen-flow dynamics.
std::shared_ptr<const MeanFieldHook> meanfield_hook(const TwoBodyKernel& kernel, const MeanFieldFlow& flow);

}  // namespace qfl
