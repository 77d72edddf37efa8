#include "qfl/experiments/verify.hpp"

#include <cmath>
#include <random>

#include "qfl/experiments/config.hpp"
#include "qfl/qfl.hpp"

namespace qfl::experiments {

namespace {

int workers(int threads) { return threads > 0 ? threads : default_thread_count(); }

PropertyResult trajectory_invariants(std::uint64_t seed) {
  const SdeModel model = ising_qubit_model();
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  std::mt19937_64 rng(seed);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 2.0;
  double herm = 0.0, tr = 0.0, eig = 0.0;
  for (int i = 0; i < 20; ++i) {
    cfg.seed = trajectory_seed(seed, static_cast<std::uint64_t>(i));
    const DensityOperator rho0 = i % 2 ? random_pure(2, rng) : random_density(2, rng);
    const TrajectoryRecord rec = simulate_trajectory(rho0, model, i % 4 < 2 ? law.policy() : ControlPolicy{}, cfg);
    for (const auto& s : rec.states) {
      herm = std::max(herm, hermiticity_defect(s.matrix()));
      tr = std::max(tr, std::abs(trace(s.matrix()) - 1.0));
      eig = std::min(eig, min_eigenvalue(s.matrix()));
    }
  }
  return {"trajectory_density_invariants", herm <= 1e-10 && tr <= 1e-10 && eig >= -1e-8,
          {{"max_hermiticity_defect", herm}, {"max_trace_error", tr}, {"min_eigenvalue", eig}}};
}

PropertyResult bloch_equivalence(std::uint64_t seed) {
  const DensityOperator xi = bloch_to_density({0.3, 0.2, 0.5});
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 2.0;
  const auto hook = meanfield_hook(ising_kernel(), constant_flow(xi, cfg));
  SdeModel model = ising_qubit_model();
  model.mean_field = hook;
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    cfg.seed = trajectory_seed(seed, static_cast<std::uint64_t>(i));
    const Eigen::Vector3d v0(0.6, 0.0, 0.3);
    const TrajectoryRecord m = simulate_trajectory(bloch_to_density({v0.x(), v0.y(), v0.z()}), model, law.policy(), cfg);
    const BlochPath b = simulate_bloch(v0, hook.get(), law.policy(), cfg);
    for (std::size_t k = 0; k < m.states.size(); ++k) {
      const Eigen::Vector3d& v = b.states[k];
      worst = std::max(worst, hs_distance(m.states[k].matrix(), bloch_to_density({v.x(), v.y(), v.z()}).matrix()));
    }
  }
  return {"bloch_matrix_equivalence", worst <= 1e-8, {{"max_hs_distance", worst}}};
}

PropertyResult feedback_vanishing() {
  const FeedbackLaw g = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  const FeedbackLaw e = FeedbackLaw::mean_field_stabilizer(states::excited(), 5.0, 1.0, 10.0);
  const TwoQubitLaws laws = twoqubit_laws(5.0, 1.0, 10.0);
  const double a = std::abs(g(states::ground().matrix())) + std::abs(e(states::excited().matrix()));
  const auto [aa, ab] = twoqubit_feedbacks(states::product("ge"), laws);
  const double worst = std::max(a, std::abs(aa) + std::abs(ab));
  return {"feedback_vanishes_at_target", worst <= 1e-12, {{"max_abs_control", worst}}};
}

PropertyResult global_reduced(std::uint64_t seed) {
  const TwoQubitLaws laws = twoqubit_laws(5.0, 1.0, 10.0);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DensityOperator rho = random_density(4, rng);
    const auto [ga, gb] = twoqubit_feedbacks(rho, laws);
    const auto [ra, rb] = twoqubit_feedbacks(partial_trace(rho, 1, 2), partial_trace(rho, 2, 2), laws);
    worst = std::max({worst, std::abs(ga - ra), std::abs(gb - rb)});
  }
  return {"twoqubit_global_reduced_agreement", worst <= 1e-12, {{"max_difference", worst}}};
}

PropertyResult ising_meanfield(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const TwoBodyKernel k = ising_kernel();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DensityOperator rho = random_density(2, rng);
    const ComplexMatrix expect = rho.expectation(pauli::z()) * pauli::z();
    worst = std::max(worst, (meanfield_operator(k, rho) - expect).cwiseAbs().maxCoeff());
  }
  return {"ising_meanfield_operator", worst <= 1e-12, {{"max_entry_error", worst}}};
}

PropertyResult nbody_equilibria() {
  double worst = 0.0;
  for (int n : {2, 3}) {
    const NBodyModel model = assemble_nbody(n);
    const std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    const std::vector<double> dw(static_cast<std::size_t>(n), 0.05);
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::string label;
      for (int l = 0; l < n; ++l) label += (mask >> l) & 1 ? 'e' : 'g';
      const DensityOperator rho = states::product(label);
      const DensityOperator next = nbody_sme_step(rho, model, u, dw, 1e-3);
      worst = std::max(worst, hs_distance(rho.matrix(), next.matrix()));
    }
  }
  return {"nbody_product_eigenstates_invariant", worst <= 1e-12, {{"max_hs_distance", worst}}};
}

PropertyResult nbody_structure() {
  double err = 0.0;
  const NBodyModel two = assemble_nbody(2);
  err = std::max(err, hs_distance(two.hamiltonian(), 0.5 * kron(pauli::z(), pauli::z())));
  double comm = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const NBodyModel m = assemble_nbody(n);
    ComplexMatrix parity = ComplexMatrix::Identity(m.dim(), m.dim());
    for (int l = 1; l <= n; ++l) parity = parity * embed_site(pauli::z(), l, n);
    comm = std::max(comm, hs_norm(commutator(m.hamiltonian(), parity)));
  }
  return {"nbody_hamiltonian_structure", err <= 1e-12 && comm <= 1e-12,
          {{"two_site_error", err}, {"max_parity_commutator", comm}}};
}

PropertyResult target_invariance(std::uint64_t seed) {
  const SdeModel model = ising_qubit_model();
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 5.0;
  cfg.record_every = 100;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    cfg.seed = trajectory_seed(seed, static_cast<std::uint64_t>(i));
    const TrajectoryRecord rec = simulate_trajectory(states::ground(), model, law.policy(), cfg);
    for (const auto& s : rec.states) worst = std::max(worst, hs_distance(s.matrix(), states::ground().matrix()));
  }
  return {"closed_loop_target_invariance", worst <= 1e-6, {{"max_hs_distance", worst}}};
}

SuiteReport invariants(std::uint64_t seed) {
  SuiteReport r{"invariants", {}};
  r.properties.push_back(trajectory_invariants(seed));
  r.properties.push_back(bloch_equivalence(seed));
  r.properties.push_back(feedback_vanishing());
  r.properties.push_back(global_reduced(seed));
  r.properties.push_back(ising_meanfield(seed));
  r.properties.push_back(nbody_equilibria());
  r.properties.push_back(nbody_structure());
  r.properties.push_back(target_invariance(seed));
  return r;
}

SuiteReport lipschitz_suite(std::uint64_t seed) {
  SuiteReport r{"lipschitz", {}};
  for (int dim : {2, 4}) {
    const LipschitzReport l = lipschitz_check(dim, 10000, splitmix64(seed + static_cast<std::uint64_t>(dim)));
    r.properties.push_back({"lipschitz_dim_" + std::to_string(dim), l.violations == 0,
                            {{"samples", l.samples}, {"violations", l.violations}, {"max_ratio", l.max_ratio},
                             {"bound", l.bound}}});
  }
  return r;
}

SuiteReport dynkin(std::uint64_t seed, int threads) {
  SuiteReport r{"dynkin", {}};
  const SdeModel model = ising_qubit_model();
  const std::vector<double> u{0.0};
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  const MonteCarloConfig mc{10000, seed, threads};
  const DensityOperator plus = bloch_to_density({1.0, 0.0, 0.0});
  const struct {
    const char* name;
    Functional g;
    DensityOperator rho;
    double exact;
  } cases[] = {
      {"dynkin_z_at_plus", Functional::linear(pauli::z()), plus, 0.0},
      {"dynkin_x_at_plus", Functional::linear(pauli::x()), plus, -2.0},
      {"dynkin_purity_at_mixed", Functional::quadratic(pauli::identity()), states::maximally_mixed(2), 2.0},
  };
  for (const auto& c : cases) {
    const DynkinReport d = dynkin_check(c.g, c.rho, model, u, 10.0 * cfg.dt, cfg, mc);
    const bool pass = d.within_tolerance(3.0) && std::abs(d.generator_value - c.exact) < 1e-10;
    r.properties.push_back({c.name, pass,
                            {{"exact", c.exact},
                             {"generator", d.generator_value},
                             {"estimate", d.mc_estimate},
                             {"standard_error", d.standard_error},
                             {"bias_bound", d.bias_bound}}});
  }
  return r;
}

SuiteReport dpp(std::uint64_t seed, int threads) {
  SuiteReport r{"dpp", {}};
  const SdeModel model = ising_qubit_model();
  const DensityOperator rho0 = bloch_to_density({0.6, 0.0, 0.3});
  CostSpec cost;
  cost.terminal = Functional::linear(-states::ground().matrix(), 1.0);
  IntegratorConfig cfg;
  cfg.dt = 5e-3;
  cfg.horizon = 1.0;
  DppConfig dc;
  dc.master_seed = seed;
  dc.threads = threads;

  const DppReport d = dpp_check(rho0, model, cost, ControlGrid{{-1.0, 0.0, 1.0}, 10.0}, 0.5, cfg, dc);
  r.properties.push_back({"dpp_three_levels", std::abs(d.gap) <= d.tolerance,
                          {{"lhs", d.lhs},
                           {"rhs", d.rhs},
                           {"gap", d.gap},
                           {"tolerance", d.tolerance},
                           {"constant_min", d.lhs_constant}}});

  const DppReport z = dpp_check(rho0, model, cost, ControlGrid{{0.0}, 10.0}, 0.5, cfg, dc);
  const LindbladPath lp = lindblad_ode(rho0, model, nullptr, cfg);
  const double oracle = cost.terminal(lp.states.back());
  const bool pass = std::abs(z.gap) <= z.tolerance && std::abs(z.lhs - oracle) <= 3.0 * z.lhs_se &&
                    std::abs(z.rhs - oracle) <= 3.0 * z.rhs_se;
  r.properties.push_back({"dpp_degenerate_grid", pass,
                          {{"lhs", z.lhs}, {"rhs", z.rhs}, {"lindblad", oracle}, {"tolerance", z.tolerance}}});
  return r;
}

SuiteReport picard(std::uint64_t seed, int threads) {
  SuiteReport r{"picard", {}};
  const DensityOperator rho0 = states::maximally_mixed(2);
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  PicardConfig pc;
  pc.master_seed = seed;
  pc.threads = threads;
  const PicardResult p = picard_solve(rho0, ising_qubit_model(), ising_kernel(), law.policy(), cfg, pc);
  bool decreasing = true;
  for (std::size_t k = 1; k < p.residuals.size(); ++k) decreasing = decreasing && p.residuals[k] < p.residuals[k - 1];
  r.properties.push_back({"picard_converges", p.converged && decreasing,
                          {{"iterations", p.iterations}, {"residuals", p.residuals}}});
  const double zt = bloch_components(p.flow.states.back().matrix())(2);
  r.properties.push_back({"picard_stabilized_flow", zt <= -0.95, {{"terminal_z", zt}}});
  return r;
}

SuiteReport chaos(std::uint64_t seed, int threads) {
  SuiteReport r{"chaos", {}};
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 3.0;
  cfg.record_every = 10;
  cfg.repair_positivity = false;
  ChaosConfig cc;
  cc.master_seed = seed;
  cc.threads = threads;
  cc.picard.master_seed = seed;
  const ChaosReport rep = chaos_experiment(bloch_to_density({0.8, 0.0, 0.0}), cfg, cc);
  r.properties.push_back({"chaos_distances_non_increasing", rep.non_increasing(2.0),
                          {{"sizes", rep.sizes}, {"distances", rep.distances}, {"standard_errors", rep.standard_errors}}});
  return r;
}

}  // namespace

bool SuiteReport::pass() const {
  for (const auto& p : properties) {
    if (!p.pass) return false;
  }
  return !properties.empty();
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["pass"] = pass();
  j["properties"] = nlohmann::json::array();
  for (const auto& p : properties) j["properties"].push_back({{"name", p.name}, {"pass", p.pass}, {"stats", p.stats}});
  return j;
}

std::vector<std::string> suite_names() { return {"invariants", "lipschitz", "lemma", "dynkin", "dpp", "picard", "chaos"}; }

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int threads) {
  const int t = workers(threads);
  if (name == "invariants") return invariants(seed);
  if (name == "lemma" || name == "lipschitz") return lipschitz_suite(seed);
  if (name == "dynkin") return dynkin(seed, t);
  if (name == "dpp") return dpp(seed, t);
  if (name == "picard") return picard(seed, t);
  if (name == "chaos") return chaos(seed, t);
  throw ConfigError("unknown suite '" + name + "'");
}

}  // namespace qfl::experiments
