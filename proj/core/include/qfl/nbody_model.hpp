#pragma once

#include "qfl/sde_model.hpp"

namespace qfl {

inline constexpr int kMaxSites = 12;
/// Embedded dense operators are cached up to this many sites.
inline constexpr int kDenseSites = 8;
/// Non-diagonal models need the dense integrator, limited to this size.
inline constexpr int kMaxDenseSites = 10;

struct NBodyComponents {
  ComplexMatrix site_hamiltonian = ComplexMatrix::Zero(2, 2);
  /// Two-site operator A on C^2 (x) C^2.
  ComplexMatrix pair_op = kron(pauli::z(), pauli::z());
  ComplexMatrix coupling = pauli::z();
  ComplexMatrix control_op = pauli::x();
  /// Prefactor of sum_{l > l'} A_{ll'}; 0 selects 1/N.
  double interaction_scale = 0.0;
};

// N qubits: H = sum_l H_l + s sum_{l > l'} A_{ll'}, one measurement channel
// L_l and one control operator per site.
class NBodyModel {
 public:
  int sites() const { return n_; }
  int dim() const { return 1 << n_; }
  double interaction_scale() const { return scale_; }
  const NBodyComponents& components() const { return comp_; }

  /// True when H and every L_l are diagonal, enabling the entrywise update.
  bool diagonal() const { return diagonal_; }
  const Eigen::VectorXd& hamiltonian_diagonal() const { return h_diag_; }
  /// dim x N matrix of the diagonals of the embedded couplings.
  const ComplexMatrix& coupling_diagonals() const { return l_diag_; }

  /// Dense caches exist for N <= kDenseSites or non-diagonal models.
  bool has_dense() const { return !couplings_.empty(); }
  const ComplexMatrix& hamiltonian() const;
  const std::vector<ComplexMatrix>& couplings() const;
  const std::vector<ComplexMatrix>& control_ops() const;

  /// Dense form for the generic integrator.
  SdeModel as_sde_model() const;

 private:
  friend NBodyModel assemble_nbody(int n, const NBodyComponents& c);

  int n_ = 0;
  double scale_ = 0.0;
  NBodyComponents comp_;
  bool diagonal_ = false;
  Eigen::VectorXd h_diag_;
  ComplexMatrix l_diag_;
  ComplexMatrix hamiltonian_;
  std::vector<ComplexMatrix> couplings_;
  std::vector<ComplexMatrix> controls_;
};

/// Builds and caches the embedded operators; rejects N outside [2, 12].
NBodyModel assemble_nbody(int n, const NBodyComponents& c = {});

}  // namespace qfl
