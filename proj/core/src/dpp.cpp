#include "qfl/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qfl/ensemble.hpp"
#include "qfl/errors.hpp"
#include "qfl/noise.hpp"

namespace qfl {

void ControlGrid::validate() const {
  if (values.empty()) throw InvalidArgument("ControlGrid: no levels");
  if (!std::is_sorted(values.begin(), values.end())) throw InvalidArgument("ControlGrid: levels must be sorted");
  for (double v : values) {
    if (!(std::abs(v) <= alpha_max)) throw InvalidArgument("ControlGrid: level exceeds alpha_max");
  }
}

bool DppReport::consistent() const { return std::abs(gap) <= tolerance && lhs_constant >= rhs - tolerance; }

namespace {

struct Stat {
  double mean = 0.0;
  double se = 0.0;
};

Stat stat(const std::vector<double>& v) {
  Stat s;
  const double n = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return s;
}

}  // namespace

DppReport dpp_check(const DensityOperator& rho0, const SdeModel& model, const CostSpec& cost, const ControlGrid& grid,
                    double tau, const IntegratorConfig& cfg, const DppConfig& dpp) {
  model.validate();
  cfg.validate();
  grid.validate();
  if (model.controls() != 1) throw InvalidArgument("dpp_check: model must have exactly one control channel");
  if (!(tau > cfg.t0 && tau < cfg.horizon)) throw InvalidArgument("dpp_check: tau must lie strictly inside the horizon");
  if (dpp.outer < 2 || dpp.inner < 1) throw InvalidArgument("dpp_check: invalid sample counts");
  const auto levels = static_cast<long long>(grid.values.size());
  const long long work = static_cast<long long>(dpp.outer) * dpp.inner * levels * levels;
  if (work > dpp.max_inner_paths) {
    throw BudgetExceeded("dpp_check: " + std::to_string(work) + " nested paths exceed the cap of " +
                         std::to_string(dpp.max_inner_paths));
  }

  IntegratorConfig first = cfg, second = cfg;
  first.horizon = tau;
  second.t0 = tau;
  const std::size_t nl = grid.values.size();
  std::vector<ControlPolicy> policies;
  for (double v : grid.values) policies.push_back(constant_controls({v}));

  DppReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  rep.lhs = rep.rhs = rep.lhs_constant = inf;

  const auto outer = static_cast<std::size_t>(dpp.outer);
  for (std::size_t a = 0; a < nl; ++a) {
    std::vector<double> rhs_sample(outer), lhs_sample(outer), constant_sample(outer);
    parallel_for(dpp.outer, dpp.threads, [&](int i) {
      const auto k = static_cast<std::size_t>(i);
      // outer seeds are shared by all first-leg levels (common random numbers)
      const std::uint64_t s_outer = trajectory_seed(dpp.master_seed, k);
      const CostSample leg1 = sample_cost(rho0.matrix(), model, policies[a], cost, first, s_outer);

      const std::uint64_t inner_master = splitmix64(s_outer ^ 0x1AAE5ULL);
      double best = inf;
      std::size_t best_level = 0;
      for (std::size_t b = 0; b < nl; ++b) {
        double s = 0.0;
        for (int j = 0; j < dpp.inner; ++j) {
          const CostSample leg2 = sample_cost(leg1.final_state, model, policies[b], cost, second,
                                              trajectory_seed(inner_master, static_cast<std::uint64_t>(j)));
          s += leg2.running + leg2.terminal;
        }
        s /= dpp.inner;
        if (s < best) {
          best = s;
          best_level = b;
        }
      }
      rhs_sample[k] = leg1.running + best;

      const CostSample cont = sample_cost(leg1.final_state, model, policies[best_level], cost, second,
                                          splitmix64(s_outer + 0x5EEDULL));
      lhs_sample[k] = leg1.running + cont.running + cont.terminal;

      const CostSample whole = sample_cost(rho0.matrix(), model, policies[a], cost, cfg, s_outer);
      constant_sample[k] = whole.running + whole.terminal;
    });
    const Stat r = stat(rhs_sample), l = stat(lhs_sample), c = stat(constant_sample);
    rep.rhs_by_level.push_back(r.mean);
    rep.lhs_by_level.push_back(l.mean);
    rep.constant_by_level.push_back(c.mean);
    if (r.mean < rep.rhs) {
      rep.rhs = r.mean;
      rep.rhs_se = r.se;
    }
    if (l.mean < rep.lhs) {
      rep.lhs = l.mean;
      rep.lhs_se = l.se;
    }
    if (c.mean < rep.lhs_constant) {
      rep.lhs_constant = c.mean;
      rep.lhs_constant_se = c.se;
    }
  }
  rep.gap = rep.lhs - rep.rhs;
  rep.tolerance = 3.0 * std::hypot(rep.lhs_se, rep.rhs_se);
  return rep;
}

}  // namespace qfl
