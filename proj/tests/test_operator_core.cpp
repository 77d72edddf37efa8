#include <gtest/gtest.h>

#include <random>

#include "qfl/density.hpp"
#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"
#include "qfl/linalg.hpp"

using namespace qfl;

namespace {

double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

ComplexMatrix bell() {
  ComplexMatrix psi = ComplexMatrix::Zero(4, 1);
  psi(0, 0) = psi(3, 0) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

}  // namespace

TEST(HsInner, PauliValues) {
  EXPECT_NEAR(hs_inner(pauli::identity(), pauli::identity()).real(), 2.0, 1e-15);
  EXPECT_NEAR(std::abs(hs_inner(pauli::z(), pauli::x())), 0.0, 1e-15);
  EXPECT_NEAR(hs_inner(pauli::z(), pauli::z()).real(), 2.0, 1e-15);
  EXPECT_NEAR(hs_norm(pauli::y()), std::sqrt(2.0), 1e-15);
}

TEST(HsInner, DimensionMismatchThrows) {
  EXPECT_THROW(hs_inner(pauli::identity(2), pauli::identity(4)), DimensionError);
}

TEST(HsInner, NormAxioms) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    ComplexMatrix a(3, 3), b(3, 3);
    for (int k = 0; k < 9; ++k) {
      a(k % 3, k / 3) = Complex(n(rng), n(rng));
      b(k % 3, k / 3) = Complex(n(rng), n(rng));
    }
    const double s = n(rng);
    EXPECT_LE(hs_norm(a + b), hs_norm(a) + hs_norm(b) + 1e-12);
    EXPECT_NEAR(hs_norm(s * a), std::abs(s) * hs_norm(a), 1e-12);
  }
}

TEST(Bloch, CanonicalStates) {
  EXPECT_LT(max_abs(bloch_to_density({0, 0, 1}).matrix() - states::excited().matrix()), 1e-15);
  EXPECT_LT(max_abs(bloch_to_density({0, 0, -1}).matrix() - states::ground().matrix()), 1e-15);
  EXPECT_LT(max_abs(bloch_to_density({0, 0, 0}).matrix() - 0.5 * pauli::identity()), 1e-15);
  EXPECT_NEAR(states::excited().matrix()(0, 0).real(), 1.0, 0.0);
}

TEST(Bloch, FromDensity) {
  const BlochVector e = density_to_bloch(states::excited());
  EXPECT_NEAR(e.z, 1.0, 1e-15);
  const BlochVector m = density_to_bloch(states::maximally_mixed(2));
  EXPECT_NEAR(m.norm(), 0.0, 1e-15);
  const DensityOperator mix((states::excited().matrix() + 3.0 * states::ground().matrix()) / 4.0);
  const BlochVector v = density_to_bloch(mix);
  EXPECT_NEAR(v.x, 0.0, 1e-15);
  EXPECT_NEAR(v.y, 0.0, 1e-15);
  EXPECT_NEAR(v.z, -0.5, 1e-15);
}

TEST(Bloch, RoundTripAndSpectrum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector3d v(u(rng), u(rng), u(rng));
    if (v.norm() > 1.0) v /= v.norm();
    const DensityOperator rho = bloch_to_density({v.x(), v.y(), v.z()});
    const BlochVector back = density_to_bloch(rho);
    EXPECT_NEAR(back.x, v.x(), 1e-12);
    EXPECT_NEAR(back.y, v.y(), 1e-12);
    EXPECT_NEAR(back.z, v.z(), 1e-12);
    const RealVector ev = hermitian_eigenvalues(rho.matrix());
    EXPECT_GE(ev(0), -1e-12);
    EXPECT_LE(ev(1), 1.0 + 1e-12);
  }
}

TEST(Bloch, RejectsOutsideBall) {
  EXPECT_THROW(BlochVector(1.0, 0.1, 0.0), InvalidArgument);
  EXPECT_THROW(density_to_bloch(states::maximally_mixed(4)), DimensionError);
}

TEST(DensityOperator, ValidatesInvariants) {
  ComplexMatrix m = 0.5 * pauli::identity();
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityOperator{m}, InvalidArgument);
  EXPECT_THROW(DensityOperator{ComplexMatrix(pauli::identity())}, InvalidArgument);
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  EXPECT_THROW(DensityOperator{neg}, InvalidArgument);
  EXPECT_NO_THROW(DensityOperator{bell()});
}

TEST(Embedding, SiteOperators) {
  EXPECT_LT(max_abs(embed_site(pauli::z(), 1, 2) - kron(pauli::z(), pauli::identity())), 1e-15);
  EXPECT_LT(max_abs(embed_site(pauli::z(), 2, 2) - kron(pauli::identity(), pauli::z())), 1e-15);
  EXPECT_THROW(embed_site(pauli::z(), 3, 2), DimensionError);
  EXPECT_THROW(embed_site(pauli::z(), 0, 2), DimensionError);
}

TEST(Embedding, FlipsOnlyItsSite) {
  // basis |e g e>: index bits 0 1 0 with site 1 most significant
  const ComplexMatrix x2 = embed_site(pauli::x(), 2, 3);
  Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(8);
  basis(0b010) = 1.0;
  const Eigen::VectorXcd out = x2 * basis;
  EXPECT_NEAR(std::abs(out(0b000)), 1.0, 1e-15);
  EXPECT_NEAR(out.norm(), 1.0, 1e-15);
}

TEST(Embedding, PairOperators) {
  const ComplexMatrix zz = kron(pauli::z(), pauli::z());
  const ComplexMatrix e12 = embed_pair(zz, 1, 2, 2);
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect.diagonal() << 1, -1, -1, 1;
  EXPECT_LT(max_abs(e12 - expect), 1e-15);
  EXPECT_LT(max_abs(e12 - embed_site(pauli::z(), 1, 2) * embed_site(pauli::z(), 2, 2)), 1e-15);

  const ComplexMatrix e13 = embed_pair(zz, 1, 3, 3);
  const ComplexMatrix brute = kron(kron(pauli::z(), pauli::identity()), pauli::z());
  EXPECT_LT(max_abs(e13 - brute), 1e-15);
  EXPECT_THROW(embed_pair(zz, 2, 2, 3), DimensionError);

  // non-product base: ordering matters
  const ComplexMatrix xz = kron(pauli::x(), pauli::z());
  EXPECT_LT(max_abs(embed_pair(xz, 3, 1, 3) - kron(kron(pauli::z(), pauli::identity()), pauli::x())), 1e-15);
}

TEST(Embedding, AlgebraOnRandomPaulis) {
  const ComplexMatrix ps[] = {pauli::identity(), pauli::x(), pauli::y(), pauli::z()};
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int n = 1; n <= 4; ++n) {
    std::uniform_int_distribution<int> site(1, n);
    for (int i = 0; i < 20; ++i) {
      const ComplexMatrix& a = ps[pick(rng)];
      const ComplexMatrix& b = ps[pick(rng)];
      const int s = site(rng), t = site(rng);
      EXPECT_LT(max_abs(embed_site(a, s, n) * embed_site(b, s, n) - embed_site(a * b, s, n)), 1e-14);
      if (s != t) {
        EXPECT_LT(max_abs(commutator(embed_site(a, s, n), embed_site(b, t, n))), 1e-14);
      }
    }
  }
}

TEST(PartialTrace, ProductAndBellStates) {
  const DensityOperator ge = states::product("ge");
  EXPECT_LT(max_abs(partial_trace(ge, 1, 2).matrix() - states::ground().matrix()), 1e-15);
  EXPECT_LT(max_abs(partial_trace(ge, 2, 2).matrix() - states::excited().matrix()), 1e-15);
  EXPECT_LT(max_abs(partial_trace(DensityOperator(bell()), 1, 2).matrix() - 0.5 * pauli::identity()), 1e-15);
  EXPECT_THROW(partial_trace(states::maximally_mixed(4), 1, 3), DimensionError);
}

TEST(PartialTrace, RandomProducts) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const DensityOperator a = random_density(2, rng);
    const DensityOperator b = random_density(2, rng);
    const DensityOperator c = random_density(2, rng);
    const DensityOperator abc = tensor(tensor(a, b), c);
    EXPECT_LT(max_abs(partial_trace(abc, 1, 3).matrix() - a.matrix()), 1e-14);
    EXPECT_LT(max_abs(partial_trace(abc, 2, 3).matrix() - b.matrix()), 1e-14);
    EXPECT_LT(max_abs(partial_trace(abc, 3, 3).matrix() - c.matrix()), 1e-14);
  }
}

TEST(Repair, ClipsNegativeEigenvalue) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.001;
  m(1, 1) = -0.001;
  const RepairResult r = repair(m, true);
  EXPECT_TRUE(r.clipped);
  EXPECT_NEAR(r.min_eigenvalue, -0.001, 1e-15);
  EXPECT_NO_THROW(DensityOperator{r.state});
}
