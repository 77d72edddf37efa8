#include "qfl/embedding.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qfl/errors.hpp"

namespace qfl {

namespace {

Eigen::Index ipow(Eigen::Index base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_site(int site, int n_sites, const char* what) {
  if (n_sites < 1 || site < 1 || site > n_sites) {
    throw DimensionError(std::string(what) + ": site " + std::to_string(site) + " outside [1, " +
                         std::to_string(n_sites) + "]");
  }
}

}  // namespace

int local_dimension(Eigen::Index dim, int n_sites) {
  if (n_sites < 1) throw DimensionError("local_dimension: n_sites must be positive");
  const auto d = static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(dim), 1.0 / n_sites)));
  for (Eigen::Index c = std::max<Eigen::Index>(1, d - 1); c <= d + 1; ++c) {
    if (ipow(c, n_sites) == dim) return static_cast<int>(c);
  }
  throw DimensionError("dimension " + std::to_string(dim) + " is not a perfect power of order " +
                       std::to_string(n_sites));
}

ComplexMatrix embed_site(const ComplexMatrix& base, int site, int n_sites) {
  require_square(base, "embed_site");
  check_site(site, n_sites, "embed_site");
  const Eigen::Index d = base.rows();
  ComplexMatrix left = ComplexMatrix::Identity(ipow(d, site - 1), ipow(d, site - 1));
  ComplexMatrix right = ComplexMatrix::Identity(ipow(d, n_sites - site), ipow(d, n_sites - site));
  return kron(kron(left, base), right);
}

ComplexMatrix embed_site(const SiteOperator& op) { return embed_site(op.base, op.site, op.n_sites); }

ComplexMatrix embed_pair(const ComplexMatrix& base, int first, int second, int n_sites) {
  require_square(base, "embed_pair");
  check_site(first, n_sites, "embed_pair");
  check_site(second, n_sites, "embed_pair");
  if (first == second) throw DimensionError("embed_pair: sites must be distinct");
  const int d = local_dimension(base.rows(), 2);
  const Eigen::Index dim = ipow(d, n_sites);
  // digit of site s in index i: (i / d^(n-s)) % d
  const Eigen::Index w1 = ipow(d, n_sites - first);
  const Eigen::Index w2 = ipow(d, n_sites - second);
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Eigen::Index j1 = (j / w1) % d;
    const Eigen::Index j2 = (j / w2) % d;
    const Eigen::Index rest = j - j1 * w1 - j2 * w2;
    for (Eigen::Index i1 = 0; i1 < d; ++i1) {
      for (Eigen::Index i2 = 0; i2 < d; ++i2) {
        const Complex v = base(i1 * d + i2, j1 * d + j2);
        if (v != Complex(0.0)) out(rest + i1 * w1 + i2 * w2, j) = v;
      }
    }
  }
  return out;
}

ComplexMatrix embed_pair(const PairOperator& op) { return embed_pair(op.base, op.first, op.second, op.n_sites); }

ComplexMatrix partial_trace(StateView rho, int keep, int n_sites) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw DimensionError("partial_trace: expected a square matrix");
  check_site(keep, n_sites, "partial_trace");
  const int d = local_dimension(rho.rows(), n_sites);
  const Eigen::Index inner = ipow(d, n_sites - keep);
  const Eigen::Index outer = ipow(d, keep - 1);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  // index = (o * d + k) * inner + r
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Complex s = 0.0;
      for (Eigen::Index o = 0; o < outer; ++o) {
        const Eigen::Index ra = (o * d + a) * inner;
        const Eigen::Index rb = (o * d + b) * inner;
        for (Eigen::Index r = 0; r < inner; ++r) s += rho(ra + r, rb + r);
      }
      out(a, b) = s;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, int keep, int n_sites) {
  return DensityOperator::trusted(partial_trace(rho.matrix(), keep, n_sites));
}

}  // namespace qfl
