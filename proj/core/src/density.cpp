#include "qfl/density.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "qfl/errors.hpp"

namespace qfl {

DensityOperator::DensityOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "DensityOperator");
  const double herm = hermiticity_defect(m_);
  if (herm > DensityTolerance::hermitian) {
    throw InvalidArgument("DensityOperator: not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > DensityTolerance::trace || std::abs(m_.trace().imag()) > DensityTolerance::trace) {
    throw InvalidArgument("DensityOperator: trace " + std::to_string(tr) + " != 1");
  }
  const double lmin = min_eigenvalue(m_);
  if (lmin < DensityTolerance::eigenvalue) {
    std::ostringstream os;
    os << "DensityOperator: negative eigenvalue " << lmin;
    throw InvalidArgument(os.str());
  }
}

DensityOperator DensityOperator::trusted(ComplexMatrix m) { return DensityOperator(std::move(m), Unchecked{}); }

double DensityOperator::purity() const { return m_.squaredNorm(); }

double DensityOperator::expectation(const ComplexMatrix& op) const {
  require_same_dim(m_, op, "expectation");
  // tr(rho op) = sum_ij rho_ij op_ji
  return (m_.array() * op.transpose().array()).sum().real();
}

double DensityOperator::overlap(const DensityOperator& other) const { return expectation(other.matrix()); }

BlochVector::BlochVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
  if (!(norm() <= 1.0 + 1e-9)) {
    throw InvalidArgument("BlochVector: norm " + std::to_string(norm()) + " exceeds 1");
  }
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

bool operator==(const BlochVector& a, const BlochVector& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

DensityOperator bloch_to_density(const BlochVector& v) {
  if (!(v.norm() <= 1.0 + 1e-9)) throw InvalidArgument("bloch_to_density: norm exceeds 1");
  ComplexMatrix m(2, 2);
  m << 0.5 * (1.0 + v.z), 0.5 * Complex(v.x, -v.y), 0.5 * Complex(v.x, v.y), 0.5 * (1.0 - v.z);
  return DensityOperator::trusted(std::move(m));
}

Eigen::Vector3d bloch_components(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw DimensionError("bloch_components: expected a 2x2 matrix");
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

BlochVector density_to_bloch(const DensityOperator& rho) {
  if (rho.dim() != 2) throw DimensionError("density_to_bloch: expected dim 2, got " + std::to_string(rho.dim()));
  const ComplexMatrix& m = rho.matrix();
  // off-diagonals averaged so tiny Hermiticity defects do not bias x, y
  const Complex c = 0.5 * (m(1, 0) + std::conj(m(0, 1)));
  BlochVector v;
  v.x = 2.0 * c.real();
  v.y = 2.0 * c.imag();
  v.z = (m(0, 0) - m(1, 1)).real();
  return v;
}

namespace states {

DensityOperator excited() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return DensityOperator::trusted(std::move(m));
}

DensityOperator ground() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return DensityOperator::trusted(std::move(m));
}

DensityOperator maximally_mixed(int dim) {
  if (dim < 1) throw InvalidArgument("maximally_mixed: dim must be positive");
  return DensityOperator::trusted(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator product(const std::string& label) {
  if (label.empty()) throw InvalidArgument("product: empty label");
  ComplexMatrix m = ComplexMatrix::Ones(1, 1);
  for (char c : label) {
    if (c == 'g') {
      m = kron(m, ground().matrix());
    } else if (c == 'e') {
      m = kron(m, excited().matrix());
    } else {
      throw InvalidArgument(std::string("product: unknown site label '") + c + "'");
    }
  }
  return DensityOperator::trusted(std::move(m));
}

}  // namespace states

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::trusted(kron(a.matrix(), b.matrix()));
}

DensityOperator tensor_power(const DensityOperator& rho, int n) {
  if (n < 1) throw InvalidArgument("tensor_power: n must be positive");
  ComplexMatrix m = rho.matrix();
  for (int i = 1; i < n; ++i) m = kron(m, rho.matrix());
  return DensityOperator::trusted(std::move(m));
}

RepairResult repair(const ComplexMatrix& m, bool clip) {
  RepairResult out;
  out.state = hermitian_part(m);
  out.state /= out.state.trace().real();
  out.min_eigenvalue = min_eigenvalue(out.state);
  if (clip && out.min_eigenvalue < 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(out.state);
    RealVector lam = es.eigenvalues().cwiseMax(0.0);
    lam /= lam.sum();
    out.state = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    out.state = hermitian_part(out.state);
    out.clipped = true;
  }
  return out;
}

namespace {

ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(n01(rng), n01(rng));
  }
  return g;
}

}  // namespace

DensityOperator random_density(int dim, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix m = g * g.adjoint();
  m = hermitian_part(m);
  m /= m.trace().real();
  return DensityOperator(std::move(m));
}

DensityOperator random_pure(int dim, std::mt19937_64& rng) {
  ComplexMatrix psi = ginibre(dim, 1, rng);
  psi /= psi.norm();
  return DensityOperator(hermitian_part(psi * psi.adjoint()));
}

ComplexMatrix random_traceless_direction(int dim, std::mt19937_64& rng) {
  ComplexMatrix h = hermitian_part(ginibre(dim, dim, rng));
  h -= (h.trace() / static_cast<double>(dim)) * ComplexMatrix::Identity(dim, dim);
  return h / h.norm();
}

}  // namespace qfl
