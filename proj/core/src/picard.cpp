#include "qfl/picard.hpp"

#include <cmath>
#include <sstream>

#include "qfl/errors.hpp"
#include "qfl/noise.hpp"

namespace qfl {

void PicardConfig::validate() const {
  if (ensemble_size < 100) throw InvalidArgument("Picard ensemble size must be >= 100");
  if (!(tolerance > 0.0)) throw InvalidArgument("Picard tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("Picard max_iterations must be >= 1");
  if (threads < 1) throw InvalidArgument("thread count must be >= 1");
}

FrozenFlowResult simulate_frozen_flow(const DensityOperator& rho0, const SdeModel& base, const TwoBodyKernel& kernel,
                                      const MeanFieldFlow& xi, const ControlPolicy& policy,
                                      const IntegratorConfig& cfg, int trajectories, std::uint64_t master_seed,
                                      int threads) {
  if (base.mean_field) throw InvalidArgument("simulate_frozen_flow: base model already carries a mean-field term");
  IntegratorConfig c = cfg;
  c.record_every = 1;
  c.validate();
  if (static_cast<long>(xi.states.size()) != c.steps() + 1 || std::abs(xi.dt - c.dt) > 1e-15 ||
      std::abs(xi.t0 - c.t0) > 1e-15) {
    throw DimensionError("simulate_frozen_flow: flow must be defined on the integration grid");
  }
  SdeModel model = base;
  model.mean_field = meanfield_hook(kernel, xi);

  EnsembleConfig ens;
  ens.trajectories = trajectories;
  ens.master_seed = master_seed;
  ens.threads = threads;
  const bool qubit = rho0.dim() == 2;
  if (qubit) {
    ens.observables = {expectation_observable("x", pauli::x()), expectation_observable("y", pauli::y()),
                       expectation_observable("z", pauli::z())};
  }
  const EnsembleSummary s = simulate_ensemble(rho0, model, policy, c, ens);

  FrozenFlowResult out;
  out.mean.t0 = c.t0;
  out.mean.dt = c.dt;
  out.mean.states.reserve(s.mean_state.size());
  for (const auto& m : s.mean_state) out.mean.states.push_back(DensityOperator::trusted(hermitian_part(m)));
  out.standard_error.assign(s.times.size(), 0.0);
  if (qubit) {
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const double v = s.observable_variance.row(static_cast<Eigen::Index>(k)).sum();
      out.standard_error[k] = std::sqrt(v / trajectories / 2.0);
    }
  }
  out.terminal = s.terminal;
  out.repairs = s.repairs;
  return out;
}

PicardResult picard_solve(const DensityOperator& rho0, const SdeModel& base, const TwoBodyKernel& kernel,
                          const ControlPolicy& policy, const IntegratorConfig& cfg, const PicardConfig& picard) {
  picard.validate();
  IntegratorConfig c = cfg;
  c.record_every = 1;
  PicardResult out;
  MeanFieldFlow xi = constant_flow(rho0, c);
  for (int k = 0; k < picard.max_iterations; ++k) {
    const std::uint64_t seed =
        picard.common_random_numbers ? picard.master_seed : splitmix64(picard.master_seed + static_cast<std::uint64_t>(k));
    FrozenFlowResult next =
        simulate_frozen_flow(rho0, base, kernel, xi, policy, c, picard.ensemble_size, seed, picard.threads);
    const double r = sup_distance(next.mean, xi);
    out.residuals.push_back(r);
    out.standard_error = 0.0;
    for (double se : next.standard_error) out.standard_error = std::max(out.standard_error, se);
    xi = std::move(next.mean);
    out.iterations = k + 1;
    if (r <= picard.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.flow = std::move(xi);
  if (!out.converged) {
    std::ostringstream os;
    os << "no convergence within " << picard.max_iterations << " iterations; residuals:";
    for (double r : out.residuals) os << ' ' << r;
    out.diagnostic = os.str();
  }
  return out;
}

}  // namespace qfl
