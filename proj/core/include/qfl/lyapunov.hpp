#pragma once

#include <string>
#include <vector>

#include "qfl/density.hpp"

namespace qfl {

/// sqrt(clamp(1 - tr(gamma target), 0, 1)).
double lyapunov(StateView gamma, const DensityOperator& target);
double lyapunov(const DensityOperator& gamma, const DensityOperator& target);

struct LyapunovReport {
  std::vector<double> times;
  std::vector<double> mean_v;
  double fitted_rate = 0.0;
  double intercept = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least-squares slope of log(mean V) against t over [begin, end]. Throws
/// InvalidArgument naming the first offending time if the window holds an
/// entry <= 1e-12 (shrink the window) or fewer than two points.
LyapunovReport fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& mean_v,
                                    double begin, double end);
/// Default window [0.5, 0.8] T.
LyapunovReport fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& mean_v);

enum class Outcome { excited, ground, undecided };

struct ReductionReport {
  std::vector<Outcome> outcomes;
  int excited = 0;
  int ground = 0;
  int undecided = 0;

  /// excited / all states; undecided ones count in the denominator.
  double excited_frequency() const;
  double classified_fraction() const;
};

/// Classifies qubit states by z = tr(rho sigma_z): z > threshold -> excited,
/// z < -threshold -> ground.
ReductionReport detect_reduction(const std::vector<DensityOperator>& terminal, double threshold = 0.99);

}  // namespace qfl
