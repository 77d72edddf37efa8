#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qfl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Read-only view accepted by hot-loop callbacks; binds to fixed-size and
// dynamic Eigen matrices without copying.
using StateView = Eigen::Ref<const ComplexMatrix>;

inline constexpr Complex kImag{0.0, 1.0};

namespace pauli {
ComplexMatrix identity(int dim = 2);
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

/// Hilbert-Schmidt inner product tr(a^dagger b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double hs_norm(const ComplexMatrix& a);
double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b);

Complex trace(const ComplexMatrix& a);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// ||a - a^dagger||_2.
double hermiticity_defect(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-10);
bool is_diagonal(const ComplexMatrix& a, double tol = 0.0);

/// Eigenvalues of the Hermitian part, ascending.
RealVector hermitian_eigenvalues(const ComplexMatrix& a);
double min_eigenvalue(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);

void require_square(const ComplexMatrix& a, const char* what);
void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what);

}  // namespace qfl
