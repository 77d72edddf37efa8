#pragma once

#include <memory>
#include <vector>

#include "qfl/linalg.hpp"

namespace qfl {

// Time-dependent Hamiltonian term, piecewise constant on a uniform grid:
// value k holds on [t0 + k dt, t0 + (k+1) dt). Times past the grid use the
// last value.
class MeanFieldHook {
 public:
  MeanFieldHook(double t0, double dt, std::vector<ComplexMatrix> values);

  const ComplexMatrix& at(double t) const;
  const ComplexMatrix& at_index(std::size_t k) const;
  std::size_t size() const { return values_.size(); }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  int dim() const { return static_cast<int>(values_.front().rows()); }

 private:
  double t0_;
  double dt_;
  std::vector<ComplexMatrix> values_;
};

struct SdeModel {
  ComplexMatrix hamiltonian;
  std::vector<ComplexMatrix> couplings;
  std::vector<ComplexMatrix> control_ops;
  std::shared_ptr<const MeanFieldHook> mean_field;

  int dim() const { return static_cast<int>(hamiltonian.rows()); }
  std::size_t channels() const { return couplings.size(); }
  std::size_t controls() const { return control_ops.size(); }

  /// Dimensions agree and H, controls are Hermitian to 1e-10.
  void validate() const;
};

/// H = 0, L = sigma_z, controls {sigma_x}: the monitored Ising qubit with no
/// mean field attached.
SdeModel ising_qubit_model();

}  // namespace qfl
