#pragma once

#include <cstdint>
#include <vector>

namespace qfl {

struct LipschitzReport {
  int dim = 0;
  int samples = 0;
  int violations = 0;
  /// max ||R[rho] - R[rho']||_2 / (||L||_2 ||rho - rho'||_2) over the samples.
  double max_ratio = 0.0;
  double bound = 6.0;
};

/// Samples density pairs (mixed, pure, and nearby pairs in equal parts) and
/// tests ||R[rho] - R[rho']||_2 <= 6 ||L||_2 ||rho - rho'||_2 with L =
/// sigma_z on site 1 of dim = 2^n.
LipschitzReport lipschitz_check(int dim, int samples, std::uint64_t seed);

}  // namespace qfl
