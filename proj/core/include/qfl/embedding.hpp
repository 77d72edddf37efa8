#pragma once

#include "qfl/density.hpp"
#include "qfl/linalg.hpp"

namespace qfl {

// Single-site operator O acting on site `site` (1-based) of `n_sites`.
struct SiteOperator {
  ComplexMatrix base;
  int site = 1;
  int n_sites = 1;
};

// Two-site operator on the ordered pair (first, second); base is indexed
// with `first` as the most significant factor.
struct PairOperator {
  ComplexMatrix base;
  int first = 1;
  int second = 2;
  int n_sites = 2;
};

/// 1 (x) ... (x) O (x) ... (x) 1, site 1 leftmost.
ComplexMatrix embed_site(const SiteOperator& op);
ComplexMatrix embed_site(const ComplexMatrix& base, int site, int n_sites);

ComplexMatrix embed_pair(const PairOperator& op);
ComplexMatrix embed_pair(const ComplexMatrix& base, int first, int second, int n_sites);

/// Reduced state of site `keep` (1-based). The local dimension is inferred
/// from rho.dim() = d^n_sites.
DensityOperator partial_trace(const DensityOperator& rho, int keep, int n_sites);
ComplexMatrix partial_trace(StateView rho, int keep, int n_sites);

/// Local dimension d with d^n_sites == dim; throws DimensionError otherwise.
int local_dimension(Eigen::Index dim, int n_sites);

}  // namespace qfl
