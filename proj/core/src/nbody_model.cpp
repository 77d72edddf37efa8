#include "qfl/nbody_model.hpp"

#include <string>

#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"

namespace qfl {

namespace {

int bit_of(int index, int site, int n) { return (index >> (n - site)) & 1; }

}  // namespace

NBodyModel assemble_nbody(int n, const NBodyComponents& c) {
  if (n < 2 || n > kMaxSites) {
    throw InvalidArgument("assemble_nbody: N=" + std::to_string(n) + " outside [2, " + std::to_string(kMaxSites) +
                          "]");
  }
  if (c.site_hamiltonian.rows() != 2 || c.coupling.rows() != 2 || c.control_op.rows() != 2) {
    throw DimensionError("assemble_nbody: site operators must be 2x2");
  }
  if (c.pair_op.rows() != 4 || c.pair_op.cols() != 4) throw DimensionError("assemble_nbody: pair operator must be 4x4");
  if (!is_hermitian(c.site_hamiltonian) || !is_hermitian(c.pair_op) || !is_hermitian(c.control_op)) {
    throw InvalidArgument("assemble_nbody: Hamiltonian parts and control operator must be Hermitian");
  }

  NBodyModel m;
  m.n_ = n;
  m.comp_ = c;
  m.scale_ = c.interaction_scale != 0.0 ? c.interaction_scale : 1.0 / n;
  m.diagonal_ = is_diagonal(c.site_hamiltonian) && is_diagonal(c.pair_op) && is_diagonal(c.coupling);
  const int dim = 1 << n;

  if (!m.diagonal_ && n > kMaxDenseSites) {
    throw InvalidArgument("assemble_nbody: non-diagonal models are limited to N <= " +
                          std::to_string(kMaxDenseSites));
  }

  if (m.diagonal_) {
    m.h_diag_.setZero(dim);
    m.l_diag_.resize(dim, n);
    for (int i = 0; i < dim; ++i) {
      double h = 0.0;
      for (int l = 1; l <= n; ++l) {
        const int b = bit_of(i, l, n);
        h += c.site_hamiltonian(b, b).real();
        m.l_diag_(i, l - 1) = c.coupling(b, b);
        for (int lp = 1; lp < l; ++lp) {
          const int r = 2 * b + bit_of(i, lp, n);
          h += m.scale_ * c.pair_op(r, r).real();
        }
      }
      m.h_diag_(i) = h;
    }
  }

  if (!m.diagonal_ || n <= kDenseSites) {
    m.hamiltonian_ = ComplexMatrix::Zero(dim, dim);
    for (int l = 1; l <= n; ++l) {
      if (!c.site_hamiltonian.isZero(0.0)) m.hamiltonian_ += embed_site(c.site_hamiltonian, l, n);
      m.couplings_.push_back(embed_site(c.coupling, l, n));
      m.controls_.push_back(embed_site(c.control_op, l, n));
    }
    for (int l = 2; l <= n; ++l) {
      for (int lp = 1; lp < l; ++lp) m.hamiltonian_ += m.scale_ * embed_pair(c.pair_op, l, lp, n);
    }
    if (!is_hermitian(m.hamiltonian_, 1e-12)) throw InvalidArgument("assemble_nbody: Hamiltonian is not Hermitian");
  }
  return m;
}

const ComplexMatrix& NBodyModel::hamiltonian() const {
  if (!has_dense()) throw InvalidArgument("NBodyModel: dense operators are not cached at N=" + std::to_string(n_));
  return hamiltonian_;
}

const std::vector<ComplexMatrix>& NBodyModel::couplings() const {
  if (!has_dense()) throw InvalidArgument("NBodyModel: dense operators are not cached at N=" + std::to_string(n_));
  return couplings_;
}

const std::vector<ComplexMatrix>& NBodyModel::control_ops() const {
  if (!has_dense()) throw InvalidArgument("NBodyModel: dense operators are not cached at N=" + std::to_string(n_));
  return controls_;
}

SdeModel NBodyModel::as_sde_model() const {
  SdeModel s;
  s.hamiltonian = hamiltonian();
  s.couplings = couplings();
  s.control_ops = control_ops();
  return s;
}

}  // namespace qfl
