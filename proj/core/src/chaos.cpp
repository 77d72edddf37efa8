#include "qfl/chaos.hpp"

#include <cmath>

#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"
#include "qfl/nbody_engine.hpp"
#include "qfl/noise.hpp"

namespace qfl {

bool ChaosReport::non_increasing(double sigmas) const {
  for (std::size_t i = 0; i + 1 < distances.size(); ++i) {
    const double slack = sigmas * std::hypot(standard_errors[i], standard_errors[i + 1]);
    if (distances[i + 1] > distances[i] + slack) return false;
  }
  return true;
}

ChaosReport chaos_experiment(const DensityOperator& rho0, const IntegratorConfig& cfg, const ChaosConfig& chaos) {
  if (rho0.dim() != 2) throw DimensionError("chaos_experiment: initial state must be a qubit state");
  if (chaos.sizes.empty()) throw InvalidArgument("chaos_experiment: no system sizes");
  if (chaos.trajectories < 2) throw InvalidArgument("chaos_experiment: need at least two trajectories");
  cfg.validate();

  ChaosReport rep;
  rep.sizes = chaos.sizes;
  rep.times = cfg.record_times();

  const ControlPolicy mf_policy = chaos.law.kind() == FeedbackLaw::Kind::zero ? ControlPolicy{} : chaos.law.policy();
  PicardConfig pc = chaos.picard;
  pc.threads = chaos.threads;
  rep.meanfield = picard_solve(rho0, ising_qubit_model(), ising_kernel(), mf_policy, cfg, pc);

  // flow lives on every step; pick the record grid out of it
  std::vector<Eigen::Vector3d> flow;
  for (long n = 0; n <= cfg.steps(); ++n) {
    if (cfg.is_record_step(n)) flow.push_back(bloch_components(rep.meanfield.flow.states[static_cast<std::size_t>(n)].matrix()));
  }
  rep.meanfield_path = flow;

  for (int n : chaos.sizes) {
    const NBodyModel model = assemble_nbody(n);
    ControlPolicy policy;
    if (chaos.law.kind() != FeedbackLaw::Kind::zero) {
      policy = site_feedback_policy(std::vector<FeedbackLaw>(static_cast<std::size_t>(n), chaos.law));
    }
    EnsembleConfig ens;
    ens.trajectories = chaos.trajectories;
    ens.master_seed = splitmix64(chaos.master_seed + static_cast<std::uint64_t>(n));
    ens.threads = chaos.threads;
    ens.keep_terminal = false;
    ens.reducer = [n](StateView rho) { return partial_trace(rho, 1, n); };
    ens.observables = {expectation_observable("x", pauli::x()), expectation_observable("y", pauli::y()),
                       expectation_observable("z", pauli::z())};
    const EnsembleSummary s = nbody_ensemble(tensor_power(rho0, n), model, policy, cfg, ens);

    double best = -1.0, best_se = 0.0, best_t = 0.0;
    std::vector<Eigen::Vector3d> path;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const Eigen::Vector3d mean = s.observable_mean.row(kk).transpose();
      path.push_back(mean);
      const Eigen::Vector3d diff = mean - flow[k];
      const double d = diff.norm() / std::sqrt(2.0);
      if (d > best) {
        best = d;
        best_t = s.times[k];
        const double nrm = diff.norm();
        double var = 0.0;
        for (int c = 0; c < 3; ++c) {
          const double w = nrm > 0.0 ? diff(c) / nrm : 1.0 / std::sqrt(3.0);
          var += w * w * s.observable_variance(kk, c);
        }
        best_se = std::sqrt(var / chaos.trajectories / 2.0);
      }
    }
    rep.distances.push_back(best);
    rep.standard_errors.push_back(best_se);
    rep.argmax_times.push_back(best_t);
    rep.ensemble_sizes.push_back(chaos.trajectories);
    rep.seeds.push_back(ens.master_seed);
    rep.marginal_paths.push_back(std::move(path));
  }
  return rep;
}

}  // namespace qfl
