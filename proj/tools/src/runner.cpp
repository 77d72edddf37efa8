#include "qfl/experiments/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "qfl/qfl.hpp"

#ifndef QFL_VERSION
#define QFL_VERSION "unknown"
#endif
#ifndef QFL_GIT_DESCRIBE
#define QFL_GIT_DESCRIBE "unknown"
#endif

namespace qfl::experiments {

namespace {

// Per-trajectory samples on the record grid: data[i] is times x columns.
struct Panel {
  std::vector<std::string> columns;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> data;

  Eigen::Index column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::logic_error("panel has no column '" + name + "'");
    return it - columns.begin();
  }
};

int thread_count(const ExperimentConfig& cfg) { return cfg.threads > 0 ? cfg.threads : default_thread_count(); }

IntegratorConfig integrator(const ExperimentConfig& cfg) {
  IntegratorConfig c;
  c.dt = cfg.dt;
  c.horizon = cfg.horizon;
  c.record_every = cfg.record_every;
  c.repair_positivity = cfg.repair;
  c.seed = cfg.seed;
  return c;
}

DensityOperator initial_qubit(const ExperimentConfig& cfg) {
  return bloch_to_density({cfg.initial[0], cfg.initial[1], cfg.initial[2]});
}

DensityOperator target_state(const ExperimentConfig& cfg) {
  return cfg.target == "excited" ? states::excited() : states::ground();
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ResultTable trace_table(const Panel& p, int count) {
  std::vector<std::string> cols{"trajectory", "t"};
  cols.insert(cols.end(), p.columns.begin(), p.columns.end());
  ResultTable table("traces", cols);
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(count), p.data.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      std::vector<double> row{static_cast<double>(i), p.times[k]};
      for (Eigen::Index c = 0; c < p.data[i].cols(); ++c) row.push_back(p.data[i](static_cast<Eigen::Index>(k), c));
      table.add_row(std::move(row));
    }
  }
  return table;
}

// t, mean_* and se_* of every column, q05/q50/q95 of the listed ones.
ResultTable ensemble_table(const Panel& p, const std::vector<std::string>& quantile_cols) {
  std::vector<std::string> cols{"t"};
  for (const auto& c : p.columns) cols.push_back("mean_" + c);
  for (const auto& c : p.columns) cols.push_back("se_" + c);
  for (const auto& c : quantile_cols) {
    cols.push_back("q05_" + c);
    cols.push_back("q50_" + c);
    cols.push_back("q95_" + c);
  }
  ResultTable table("ensemble", cols);
  const auto m = static_cast<double>(p.data.size());
  const auto nc = static_cast<Eigen::Index>(p.columns.size());
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    std::vector<double> mean(static_cast<std::size_t>(nc), 0.0), var(static_cast<std::size_t>(nc), 0.0);
    for (const auto& d : p.data) {
      for (Eigen::Index c = 0; c < nc; ++c) mean[static_cast<std::size_t>(c)] += d(kk, c);
    }
    for (auto& v : mean) v /= m;
    for (const auto& d : p.data) {
      for (Eigen::Index c = 0; c < nc; ++c) {
        const double e = d(kk, c) - mean[static_cast<std::size_t>(c)];
        var[static_cast<std::size_t>(c)] += e * e;
      }
    }
    std::vector<double> row{p.times[k]};
    row.insert(row.end(), mean.begin(), mean.end());
    for (double v : var) row.push_back(std::sqrt(v / (m - 1.0) / m));
    for (const auto& name : quantile_cols) {
      const Eigen::Index c = p.column(name);
      std::vector<double> vals;
      vals.reserve(p.data.size());
      for (const auto& d : p.data) vals.push_back(d(kk, c));
      row.push_back(quantile(vals, 0.05));
      row.push_back(quantile(vals, 0.5));
      row.push_back(quantile(vals, 0.95));
    }
    table.add_row(std::move(row));
  }
  return table;
}

std::vector<double> column_mean(const Panel& p, const std::string& name) {
  const Eigen::Index c = p.column(name);
  std::vector<double> out(p.times.size(), 0.0);
  for (const auto& d : p.data) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d(static_cast<Eigen::Index>(k), c);
  }
  for (auto& v : out) v /= static_cast<double>(p.data.size());
  return out;
}

nlohmann::json lyapunov_fit(const Panel& p, const ExperimentConfig& cfg) {
  nlohmann::json j;
  try {
    const LyapunovReport r = fit_exponential_rate(p.times, column_mean(p, "V"), cfg.fit_window[0] * cfg.horizon,
                                                  cfg.fit_window[1] * cfg.horizon);
    j["rate"] = r.fitted_rate;
    j["intercept"] = r.intercept;
    j["r_squared"] = r.r_squared;
    j["window"] = {r.window_begin, r.window_end};
    j["points"] = r.points;
  } catch (const InvalidArgument& e) {
    j["error"] = e.what();
  }
  return j;
}

template <typename Sample>
Panel simulate_panel(const ExperimentConfig& cfg, std::vector<std::string> columns, const Sample& sample) {
  Panel p;
  p.columns = std::move(columns);
  p.times = integrator(cfg).record_times();
  p.data.resize(static_cast<std::size_t>(cfg.trajectories));
  parallel_for(cfg.trajectories, thread_count(cfg), [&](int i) {
    IntegratorConfig c = integrator(cfg);
    c.seed = trajectory_seed(cfg.seed, static_cast<std::uint64_t>(i));
    p.data[static_cast<std::size_t>(i)] = sample(c);
  });
  return p;
}

RunResult run_qubit(const ExperimentConfig& cfg) {
  const bool closed = cfg.experiment == Experiment::stabilize;
  const SdeModel model = ising_qubit_model();
  const DensityOperator rho0 = initial_qubit(cfg);
  const DensityOperator target = target_state(cfg);
  const FeedbackLaw law =
      closed ? FeedbackLaw::mean_field_stabilizer(target, cfg.kappa1, cfg.kappa2, cfg.alpha_max) : FeedbackLaw::zero();
  const ControlPolicy policy = closed ? law.policy() : ControlPolicy{};

  const Panel p = simulate_panel(cfg, {"x", "y", "z", "V", "alpha", "Y", "fidelity"}, [&](const IntegratorConfig& c) {
    const TrajectoryRecord rec = simulate_trajectory(rho0, model, policy, c);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rec.states.size()), 7);
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const ComplexMatrix& m = rec.states[k].matrix();
      const Eigen::Vector3d b = bloch_components(m);
      out.row(kk) << b(0), b(1), b(2), lyapunov(m, target), closed ? law(m) : 0.0, rec.records(kk, 0),
          rec.states[k].overlap(target);
    }
    return out;
  });

  RunResult r;
  r.tables.push_back(trace_table(p, cfg.trace_count));
  r.tables.push_back(ensemble_table(p, {"z", "fidelity"}));

  ResultTable terminal("terminal", {"trajectory", "x", "y", "z", "fidelity", "outcome"});
  int excited = 0, ground = 0, reached = 0;
  const Eigen::Index last = static_cast<Eigen::Index>(p.times.size()) - 1;
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    const auto& d = p.data[i];
    const double z = d(last, 2);
    const double outcome = z > cfg.classify_threshold ? 1.0 : (z < -cfg.classify_threshold ? -1.0 : 0.0);
    excited += outcome > 0;
    ground += outcome < 0;
    reached += d(last, 6) > cfg.classify_threshold;
    terminal.add_row({static_cast<double>(i), d(last, 0), d(last, 1), z, d(last, 6), outcome});
  }
  r.tables.push_back(std::move(terminal));

  const double m = cfg.trajectories;
  const double oracle = 0.5 * (1.0 + cfg.initial[2]);
  r.results["excited"] = excited;
  r.results["ground"] = ground;
  r.results["undecided"] = cfg.trajectories - excited - ground;
  r.results["classified_fraction"] = (excited + ground) / m;
  r.results["excited_frequency"] = excited + ground > 0 ? excited / static_cast<double>(excited + ground) : 0.0;
  r.results["open_loop_excited_probability"] = oracle;
  r.results["binomial_se"] = std::sqrt(oracle * (1.0 - oracle) / m);
  r.results["target_fidelity_fraction"] = reached / m;
  r.results["terminal_mean_z"] = column_mean(p, "z").back();
  r.results["terminal_mean_fidelity"] = column_mean(p, "fidelity").back();
  r.results["lyapunov_fit"] = lyapunov_fit(p, cfg);
  return r;
}

RunResult run_twoqubit(const ExperimentConfig& cfg) {
  const bool closed = cfg.experiment == Experiment::twoqubit_stabilize;
  const NBodyModel model = assemble_nbody(2);
  const DensityOperator rho0 =
      cfg.two_qubit_initial == "mixed" ? states::maximally_mixed(4) : states::product(cfg.two_qubit_initial);
  const TwoQubitLaws laws = twoqubit_laws(cfg.kappa1, cfg.kappa2, cfg.alpha_max);
  const ControlPolicy policy = closed ? site_feedback_policy({laws.alice, laws.bob}) : ControlPolicy{};
  const DensityOperator target = states::product("ge");
  const std::array<DensityOperator, 4> corners{states::product("ee"), states::product("eg"), states::product("ge"),
                                               states::product("gg")};

  const std::vector<std::string> cols{"x1", "y1", "z1", "x2", "y2", "z2", "fidelity", "distance_F",
                                      "corner", "alpha_A", "alpha_B", "Y1", "Y2"};
  const Panel p = simulate_panel(cfg, cols, [&](const IntegratorConfig& c) {
    const TrajectoryRecord rec = nbody_simulate(rho0, model, policy, c);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rec.states.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const ComplexMatrix& m = rec.states[k].matrix();
      const ComplexMatrix a = partial_trace(m, 1, 2);
      const ComplexMatrix b = partial_trace(m, 2, 2);
      const Eigen::Vector3d va = bloch_components(a), vb = bloch_components(b);
      double best = std::numeric_limits<double>::infinity();
      int corner = 0;
      for (int j = 0; j < 4; ++j) {
        const double d = hs_distance(m, corners[static_cast<std::size_t>(j)].matrix());
        if (d < best) {
          best = d;
          corner = j;
        }
      }
      out.row(kk) << va(0), va(1), va(2), vb(0), vb(1), vb(2), rec.states[k].overlap(target), best, corner,
          closed ? laws.alice(a) : 0.0, closed ? laws.bob(b) : 0.0, rec.records(kk, 0), rec.records(kk, 1);
    }
    return out;
  });

  RunResult r;
  r.tables.push_back(trace_table(p, cfg.trace_count));
  r.tables.push_back(ensemble_table(p, {"fidelity", "distance_F"}));

  ResultTable terminal("terminal", {"trajectory", "z1", "z2", "fidelity", "distance_F", "corner"});
  const Eigen::Index last = static_cast<Eigen::Index>(p.times.size()) - 1;
  int at_target = 0, near_f = 0;
  std::array<int, 4> corner_counts{};
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    const auto& d = p.data[i];
    at_target += d(last, 6) > 0.95;
    near_f += d(last, 7) < 0.05;
    ++corner_counts[static_cast<std::size_t>(d(last, 8))];
    terminal.add_row({static_cast<double>(i), d(last, 2), d(last, 5), d(last, 6), d(last, 7), d(last, 8)});
  }
  r.tables.push_back(std::move(terminal));

  const double m = cfg.trajectories;
  r.results["target_fraction"] = at_target / m;
  r.results["product_eigenstate_fraction"] = near_f / m;
  r.results["nearest_corner_counts"] = {{"ee", corner_counts[0]},
                                        {"eg", corner_counts[1]},
                                        {"ge", corner_counts[2]},
                                        {"gg", corner_counts[3]}};
  r.results["terminal_mean_fidelity"] = column_mean(p, "fidelity").back();
  return r;
}

PicardConfig picard_config(const ExperimentConfig& cfg) {
  PicardConfig pc;
  pc.ensemble_size = cfg.picard_ensemble;
  pc.tolerance = cfg.picard_tolerance;
  pc.max_iterations = cfg.picard_max_iterations;
  pc.common_random_numbers = cfg.common_random_numbers;
  pc.master_seed = cfg.seed;
  pc.threads = thread_count(cfg);
  return pc;
}

FeedbackLaw closed_loop_law(const ExperimentConfig& cfg) {
  return cfg.feedback ? FeedbackLaw::mean_field_stabilizer(target_state(cfg), cfg.kappa1, cfg.kappa2, cfg.alpha_max)
                      : FeedbackLaw::zero();
}

RunResult run_picard(const ExperimentConfig& cfg) {
  const FeedbackLaw law = closed_loop_law(cfg);
  const IntegratorConfig ic = integrator(cfg);
  const PicardResult pr = picard_solve(initial_qubit(cfg), ising_qubit_model(), ising_kernel(),
                                       cfg.feedback ? law.policy() : ControlPolicy{}, ic, picard_config(cfg));
  RunResult r;
  ResultTable flow("flow", {"t", "x", "y", "z"});
  for (long n = 0; n <= ic.steps(); ++n) {
    if (!ic.is_record_step(n)) continue;
    const Eigen::Vector3d b = bloch_components(pr.flow.states[static_cast<std::size_t>(n)].matrix());
    flow.add_row({pr.flow.t0 + static_cast<double>(n) * pr.flow.dt, b(0), b(1), b(2)});
  }
  ResultTable res("residuals", {"iteration", "residual"});
  for (std::size_t k = 0; k < pr.residuals.size(); ++k) res.add_row({static_cast<double>(k + 1), pr.residuals[k]});
  r.tables.push_back(std::move(flow));
  r.tables.push_back(std::move(res));

  r.results["iterations"] = pr.iterations;
  r.results["converged"] = pr.converged;
  r.results["residuals"] = pr.residuals;
  r.results["standard_error"] = pr.standard_error;
  r.results["diagnostic"] = pr.diagnostic;
  r.results["terminal_z"] = bloch_components(pr.flow.states.back().matrix())(2);
  r.converged = pr.converged;
  r.diagnostic = pr.diagnostic;
  return r;
}

RunResult run_chaos(const ExperimentConfig& cfg) {
  ChaosConfig cc;
  cc.sizes = cfg.sizes;
  cc.trajectories = cfg.trajectories;
  cc.master_seed = cfg.seed;
  cc.threads = thread_count(cfg);
  cc.law = closed_loop_law(cfg);
  cc.picard = picard_config(cfg);
  const ChaosReport rep = chaos_experiment(initial_qubit(cfg), integrator(cfg), cc);

  RunResult r;
  ResultTable paths("ensemble", {"N", "t", "mean_x", "mean_y", "mean_z", "meanfield_x", "meanfield_y",
                                 "meanfield_z", "distance"});
  for (std::size_t s = 0; s < rep.sizes.size(); ++s) {
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      const Eigen::Vector3d& v = rep.marginal_paths[s][k];
      const Eigen::Vector3d& w = rep.meanfield_path[k];
      paths.add_row({static_cast<double>(rep.sizes[s]), rep.times[k], v(0), v(1), v(2), w(0), w(1), w(2),
                     (v - w).norm() / std::sqrt(2.0)});
    }
  }
  ResultTable dist("distances", {"N", "distance", "standard_error", "argmax_t", "trajectories"});
  for (std::size_t s = 0; s < rep.sizes.size(); ++s) {
    dist.add_row({static_cast<double>(rep.sizes[s]), rep.distances[s], rep.standard_errors[s], rep.argmax_times[s],
                  static_cast<double>(rep.ensemble_sizes[s])});
  }
  r.tables.push_back(std::move(paths));
  r.tables.push_back(std::move(dist));

  r.results["sizes"] = rep.sizes;
  r.results["distances"] = rep.distances;
  r.results["standard_errors"] = rep.standard_errors;
  r.results["argmax_times"] = rep.argmax_times;
  r.results["seeds"] = rep.seeds;
  r.results["non_increasing"] = rep.non_increasing(2.0);
  r.results["meanfield_iterations"] = rep.meanfield.iterations;
  r.results["meanfield_converged"] = rep.meanfield.converged;
  r.results["meanfield_residuals"] = rep.meanfield.residuals;
  r.converged = rep.meanfield.converged;
  r.diagnostic = rep.meanfield.diagnostic;
  return r;
}

struct DynkinCase {
  std::string name;
  Functional g;
  DensityOperator rho0;
  double exact;
};

std::vector<DynkinCase> dynkin_cases() {
  const DensityOperator plus = bloch_to_density({1.0, 0.0, 0.0});
  return {
      {"tr(sigma_z rho) at |+>", Functional::linear(pauli::z()), plus, 0.0},
      {"tr(sigma_x rho) at |+>", Functional::linear(pauli::x()), plus, -2.0},
      {"tr(rho^2) at I/2", Functional::quadratic(pauli::identity()), states::maximally_mixed(2), 2.0},
  };
}

RunResult run_dynkin(const ExperimentConfig& cfg) {
  RunResult r;
  ResultTable table("dynkin", {"case", "exact", "generator", "estimate", "standard_error", "bias_bound", "pass"});
  const SdeModel model = ising_qubit_model();
  const std::vector<double> u{0.0};
  MonteCarloConfig mc{cfg.samples, cfg.seed, thread_count(cfg)};
  const auto cases = dynkin_cases();
  bool all = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const DynkinReport d = dynkin_check(cases[i].g, cases[i].rho0, model, u, cfg.epsilon, integrator(cfg), mc);
    const bool pass = d.within_tolerance(3.0) && std::abs(d.generator_value - cases[i].exact) < 1e-10;
    all = all && pass;
    table.add_row({static_cast<double>(i + 1), cases[i].exact, d.generator_value, d.mc_estimate, d.standard_error,
                   d.bias_bound, pass ? 1.0 : 0.0});
    r.results["cases"].push_back({{"name", cases[i].name},
                                  {"exact", cases[i].exact},
                                  {"generator", d.generator_value},
                                  {"estimate", d.mc_estimate},
                                  {"standard_error", d.standard_error},
                                  {"bias_bound", d.bias_bound},
                                  {"pass", pass}});
  }
  r.results["pass"] = all;
  r.tables.push_back(std::move(table));
  return r;
}

CostSpec dpp_cost(const ExperimentConfig& cfg) {
  CostSpec cost;
  cost.terminal = Functional::linear(-states::ground().matrix(), 1.0);
  if (cfg.control_weight > 0.0) cost.control_weight = cfg.control_weight * pauli::identity();
  return cost;
}

RunResult run_dpp(const ExperimentConfig& cfg) {
  DppConfig dc;
  dc.outer = cfg.outer;
  dc.inner = cfg.inner;
  dc.master_seed = cfg.seed;
  dc.threads = thread_count(cfg);
  const ControlGrid grid{cfg.grid, cfg.alpha_max};
  const DppReport d = dpp_check(initial_qubit(cfg), ising_qubit_model(), dpp_cost(cfg), grid, cfg.tau, integrator(cfg), dc);

  RunResult r;
  ResultTable table("levels", {"level", "switching_cost", "nested_cost", "constant_cost"});
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    table.add_row({grid.values[i], d.lhs_by_level[i], d.rhs_by_level[i], d.constant_by_level[i]});
  }
  r.tables.push_back(std::move(table));
  r.results["lhs"] = d.lhs;
  r.results["lhs_se"] = d.lhs_se;
  r.results["rhs"] = d.rhs;
  r.results["rhs_se"] = d.rhs_se;
  r.results["gap"] = d.gap;
  r.results["tolerance"] = d.tolerance;
  r.results["constant_min"] = d.lhs_constant;
  r.results["constant_min_se"] = d.lhs_constant_se;
  r.results["consistent"] = d.consistent();
  return r;
}

RunResult run_lipschitz(const ExperimentConfig& cfg) {
  RunResult r;
  ResultTable table("lipschitz", {"dim", "samples", "violations", "max_ratio", "bound"});
  int violations = 0;
  for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
    const LipschitzReport l = lipschitz_check(cfg.dims[i], cfg.samples, splitmix64(cfg.seed + i));
    violations += l.violations;
    table.add_row({static_cast<double>(l.dim), static_cast<double>(l.samples), static_cast<double>(l.violations),
                   l.max_ratio, l.bound});
  }
  r.tables.push_back(std::move(table));
  r.results["violations"] = violations;
  return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.experiment) {
    case Experiment::reduction:
    case Experiment::stabilize:
      return run_qubit(cfg);
    case Experiment::twoqubit_reduction:
    case Experiment::twoqubit_stabilize:
      return run_twoqubit(cfg);
    case Experiment::chaos:
      return run_chaos(cfg);
    case Experiment::picard:
      return run_picard(cfg);
    case Experiment::dynkin:
      return run_dynkin(cfg);
    case Experiment::dpp:
      return run_dpp(cfg);
    case Experiment::lipschitz:
      return run_lipschitz(cfg);
  }
  throw ConfigError("unhandled experiment");
}

nlohmann::json build_stamp() {
  return {{"version", QFL_VERSION}, {"git", QFL_GIT_DESCRIBE}, {"compiler", __VERSION__}};
}

nlohmann::json make_report(const ExperimentConfig& cfg, const RunResult& result) {
  nlohmann::json j;
  j["config"] = to_json(cfg);
  j["build"] = build_stamp();
  j["seed"] = cfg.seed;
  j["converged"] = result.converged;
  if (!result.diagnostic.empty()) j["diagnostic"] = result.diagnostic;
  j["results"] = result.results;
  return j;
}

std::vector<std::string> write_outputs(const ExperimentConfig& cfg, const RunResult& result) {
  std::vector<std::string> paths;
  for (const auto& t : result.tables) {
    paths.push_back(cfg.output + "_" + t.name() + ".csv");
    t.write_csv(paths.back());
  }
  paths.push_back(cfg.output + "_report.json");
  std::ofstream out(paths.back(), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + paths.back() + "'");
  out << make_report(cfg, result).dump(2) << '\n';
  return paths;
}

}  // namespace qfl::experiments
