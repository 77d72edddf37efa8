#include "qfl/properties.hpp"

#include <algorithm>
#include <random>

#include "qfl/density.hpp"
#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"
#include "qfl/superoperators.hpp"

namespace qfl {

LipschitzReport lipschitz_check(int dim, int samples, std::uint64_t seed) {
  if (dim < 2 || (dim & (dim - 1)) != 0) throw InvalidArgument("lipschitz_check: dim must be a power of two");
  if (samples < 1) throw InvalidArgument("lipschitz_check: samples must be positive");
  int sites = 0;
  for (int d = dim; d > 1; d >>= 1) ++sites;
  const ComplexMatrix l = embed_site(pauli::z(), 1, sites);
  const double lnorm = l.norm();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LipschitzReport rep;
  rep.dim = dim;
  rep.samples = samples;
  for (int i = 0; i < samples; ++i) {
    DensityOperator a = (i % 3 == 1) ? random_pure(dim, rng) : random_density(dim, rng);
    ComplexMatrix b;
    if (i % 3 == 2) {
      // nearby pair probes the local constant
      const double s = 1e-3 * unit(rng);
      b = (1.0 - s) * a.matrix() + s * random_density(dim, rng).matrix();
    } else {
      b = (i % 3 == 1 ? random_pure(dim, rng) : random_density(dim, rng)).matrix();
    }
    const double dist = (a.matrix() - b).norm();
    if (dist == 0.0) continue;
    const double lhs = (measurement_superop(a.matrix(), l) - measurement_superop(b, l)).norm();
    const double ratio = lhs / (lnorm * dist);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > rep.bound) ++rep.violations;
  }
  return rep;
}

}  // namespace qfl
