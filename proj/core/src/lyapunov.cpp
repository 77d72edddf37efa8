#include "qfl/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfl/errors.hpp"

namespace qfl {

double lyapunov(StateView gamma, const DensityOperator& target) {
  if (gamma.rows() != target.dim()) throw DimensionError("lyapunov: state and target dims differ");
  const double overlap = (gamma.array() * target.matrix().transpose().array()).sum().real();
  return std::sqrt(std::clamp(1.0 - overlap, 0.0, 1.0));
}

double lyapunov(const DensityOperator& gamma, const DensityOperator& target) {
  return lyapunov(gamma.matrix(), target);
}

LyapunovReport fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& mean_v, double begin,
                                    double end) {
  if (times.size() != mean_v.size()) throw DimensionError("fit_exponential_rate: times and values differ in length");
  if (!(end > begin)) throw InvalidArgument("fit_exponential_rate: empty window");
  LyapunovReport rep;
  rep.times = times;
  rep.mean_v = mean_v;
  rep.window_begin = begin;
  rep.window_end = end;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  const double eps = 1e-9 * std::max(1.0, std::abs(end));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < begin - eps || times[i] > end + eps) continue;
    if (!(mean_v[i] > 1e-12)) {
      std::ostringstream os;
      os << "fit_exponential_rate: mean V = " << mean_v[i] << " at t = " << times[i]
         << " inside the window; shrink the window to end before this time";
      throw InvalidArgument(os.str());
    }
    const double x = times[i];
    const double y = std::log(mean_v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < 2) throw InvalidArgument("fit_exponential_rate: fewer than two points in the window");
  const double mx = sx / n, my = sy / n;
  const double cxx = sxx / n - mx * mx;
  const double cxy = sxy / n - mx * my;
  const double cyy = syy / n - my * my;
  rep.fitted_rate = cxy / cxx;
  rep.intercept = my - rep.fitted_rate * mx;
  rep.r_squared = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  rep.points = n;
  return rep;
}

LyapunovReport fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& mean_v) {
  if (times.empty()) throw InvalidArgument("fit_exponential_rate: no data");
  const double t0 = times.front();
  const double span = times.back() - t0;
  return fit_exponential_rate(times, mean_v, t0 + 0.5 * span, t0 + 0.8 * span);
}

double ReductionReport::excited_frequency() const {
  return outcomes.empty() ? 0.0 : static_cast<double>(excited) / static_cast<double>(outcomes.size());
}

double ReductionReport::classified_fraction() const {
  return outcomes.empty() ? 0.0 : static_cast<double>(excited + ground) / static_cast<double>(outcomes.size());
}

ReductionReport detect_reduction(const std::vector<DensityOperator>& terminal, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("detect_reduction: threshold must lie in (0,1)");
  ReductionReport rep;
  rep.outcomes.reserve(terminal.size());
  for (const auto& rho : terminal) {
    if (rho.dim() != 2) throw DimensionError("detect_reduction: expected qubit states");
    const double z = (rho.matrix()(0, 0) - rho.matrix()(1, 1)).real();
    if (z > threshold) {
      rep.outcomes.push_back(Outcome::excited);
      ++rep.excited;
    } else if (z < -threshold) {
      rep.outcomes.push_back(Outcome::ground);
      ++rep.ground;
    } else {
      rep.outcomes.push_back(Outcome::undecided);
      ++rep.undecided;
    }
  }
  return rep;
}

}  // namespace qfl
