#pragma once

#include <cstdint>
#include <random>

#include "qfl/linalg.hpp"

namespace qfl {

struct DensityTolerance {
  static constexpr double hermitian = 1e-10;
  static constexpr double trace = 1e-10;
  static constexpr double eigenvalue = -1e-8;
};

// Hermitian, unit-trace, positive semi-definite matrix. Immutable once built.
class DensityOperator {
 public:
  /// Validates all three invariants; throws InvalidArgument otherwise.
  explicit DensityOperator(ComplexMatrix m);

  /// Skips validation. For integrator output that is repaired by construction.
  static DensityOperator trusted(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  double purity() const;
  /// Re tr(rho op).
  double expectation(const ComplexMatrix& op) const;
  /// tr(rho sigma) with both treated as states.
  double overlap(const DensityOperator& other) const;

 private:
  struct Unchecked {};
  DensityOperator(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  BlochVector() = default;
  /// Rejects norms above 1 + 1e-9.
  BlochVector(double x_, double y_, double z_);

  double norm() const;
};

bool operator==(const BlochVector& a, const BlochVector& b);

DensityOperator bloch_to_density(const BlochVector& v);
BlochVector density_to_bloch(const DensityOperator& rho);

/// Raw components (tr(m sx), tr(m sy), tr(m sz)) of a 2x2 matrix, no norm check.
Eigen::Vector3d bloch_components(const ComplexMatrix& m);

namespace states {
/// sigma_z = +1 eigenstate, Bloch (0,0,1).
DensityOperator excited();
/// sigma_z = -1 eigenstate, Bloch (0,0,-1).
DensityOperator ground();
DensityOperator maximally_mixed(int dim);
/// Product of ground/excited qubits from a label such as "ge"; first letter is site 1.
DensityOperator product(const std::string& label);
}  // namespace states

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator tensor_power(const DensityOperator& rho, int n);

struct RepairResult {
  ComplexMatrix state;
  double min_eigenvalue = 0.0;
  bool clipped = false;
};

/// Hermitize and renormalize; when clip is set, negative eigenvalues are
/// zeroed and the trace restored.
RepairResult repair(const ComplexMatrix& m, bool clip);

/// Random mixed state: Ginibre matrix G, rho = G G^dagger / tr.
DensityOperator random_density(int dim, std::mt19937_64& rng);
/// Random pure state, Haar distributed.
DensityOperator random_pure(int dim, std::mt19937_64& rng);
/// Random traceless Hermitian direction with unit HS norm.
ComplexMatrix random_traceless_direction(int dim, std::mt19937_64& rng);

}  // namespace qfl
