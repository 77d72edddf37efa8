// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfl/qfl.hpp"

using namespace qfl;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240501;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::Index time_index(const std::vector<double>& times, double t) {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) < 1e-9) return static_cast<Eigen::Index>(k);
  throw std::runtime_error(fmt("time %g not on the record grid", t));
}

// Criteria 1 and 2 share the open-loop ensembles.
struct ReductionRun {
  double z0 = 0.0;
  ReductionReport reduction;
  EnsembleSummary summary;
  double seconds = 0.0;
};

std::vector<ReductionRun> reduction_runs(int threads) {
  std::vector<ReductionRun> out;
  for (double z0 : {0.0, 0.6}) {
    const auto t0 = std::chrono::steady_clock::now();
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.horizon = 5.0;
    cfg.record_every = 5000;
    EnsembleConfig ens;
    ens.trajectories = 10000;
    ens.master_seed = kSeed + static_cast<std::uint64_t>(z0 * 10);
    ens.threads = threads;
    ens.observables.push_back(expectation_observable("z", pauli::z()));
    ReductionRun r;
    r.z0 = z0;
    r.summary = simulate_ensemble(bloch_to_density({0.0, 0.0, z0}), ising_qubit_model(), nullptr, cfg, ens);
    r.reduction = detect_reduction(r.summary.terminal, 0.99);
    r.seconds = seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

Verdict criterion1(const std::vector<ReductionRun>& runs) {
  Verdict v{true, ""};
  double seconds = 0.0;
  for (const auto& r : runs) {
    const double p = (1.0 + r.z0) / 2.0;
    const auto n = static_cast<double>(r.reduction.outcomes.size());
    const double se = std::sqrt(p * (1.0 - p) / n);
    const double f = r.reduction.excited_frequency();
    const double classified = r.reduction.classified_fraction();
    v.pass = v.pass && std::abs(f - p) <= 3.0 * se && classified >= 0.99;
    v.detail += fmt("z0=%.1f P(e)=%.4f expected %.2f se %.4f classified %.4f; ", r.z0, f, p, se, classified);
    seconds += r.seconds;
  }
  v.pass = v.pass && seconds <= 120.0;
  v.detail += fmt("%.1f s", seconds);
  return v;
}

Verdict criterion2(const std::vector<ReductionRun>& runs) {
  Verdict v{true, ""};
  for (const auto& r : runs) {
    const Eigen::Index z = r.summary.observable_index("z");
    for (double t : {1.0, 2.5, 5.0}) {
      const Eigen::Index k = time_index(r.summary.times, t);
      const double mean = r.summary.observable_mean(k, z);
      const double se = r.summary.standard_error(k, z);
      v.pass = v.pass && std::abs(mean - r.z0) <= 3.0 * se;
      v.detail += fmt("z0=%.1f t=%.1f |dz|/se=%.2f; ", r.z0, t, std::abs(mean - r.z0) / se);
    }
  }
  return v;
}

Verdict criterion3(int threads) {
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 5.0;
  cfg.record_every = 100;
  EnsembleConfig ens;
  ens.trajectories = 10000;
  ens.master_seed = kSeed + 3;
  ens.threads = threads;
  ens.keep_terminal = false;
  const DensityOperator rho0 = bloch_to_density({1.0, 0.0, 0.0});
  const EnsembleSummary s = simulate_ensemble(rho0, ising_qubit_model(), nullptr, cfg, ens);
  const LindbladPath lp = lindblad_ode(rho0, ising_qubit_model(), nullptr, cfg);
  double worst = 0.0, at = 0.0;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const double d = hs_distance(s.mean_state[k], lp.states[k].matrix());
    if (d > worst) {
      worst = d;
      at = s.times[k];
    }
  }
  return {worst <= 0.05, fmt("sup-t HS distance %.4g at t=%.3g (bound 0.05)", worst, at)};
}

Verdict criterion4() {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  const auto hook = meanfield_hook(ising_kernel(), constant_flow(bloch_to_density({0.3, 0.2, 0.5}), cfg));
  SdeModel model = ising_qubit_model();
  model.mean_field = hook;
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    cfg.seed = trajectory_seed(kSeed + 4, static_cast<std::uint64_t>(i));
    const Eigen::Vector3d v0(u(rng), u(rng), u(rng));
    const ControlPolicy policy = i % 2 ? law.policy() : ControlPolicy{};
    const TrajectoryRecord m = simulate_trajectory(bloch_to_density({v0.x(), v0.y(), v0.z()}), model, policy, cfg);
    const BlochPath b = simulate_bloch(v0, hook.get(), policy, cfg);
    for (std::size_t k = 0; k < m.states.size(); ++k) {
      const Eigen::Vector3d& v = b.states[k];
      worst = std::max(worst, hs_distance(m.states[k].matrix(), bloch_to_density({v.x(), v.y(), v.z()}).matrix()));
    }
  }
  return {worst <= 1e-8, fmt("100 seeds, sup-t HS distance %.3g (bound 1e-8)", worst)};
}

Verdict criterion5() {
  Verdict v{true, ""};
  for (int dim : {2, 4}) {
    const LipschitzReport r = lipschitz_check(dim, 10000, kSeed + 5 + static_cast<std::uint64_t>(dim));
    v.pass = v.pass && r.violations == 0 && r.samples == 10000;
    v.detail += fmt("dim %d: %d violations in %d pairs, max ratio %.3f of %.0f; ", dim, r.violations, r.samples,
                    r.max_ratio, r.bound);
  }
  return v;
}

Verdict criterion6(int threads) {
  const SdeModel model = ising_qubit_model();
  const std::vector<double> u{0.0};
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  const MonteCarloConfig mc{10000, kSeed + 6, threads};
  const DensityOperator plus = bloch_to_density({1.0, 0.0, 0.0});
  const struct {
    const char* name;
    Functional g;
    DensityOperator rho;
    double exact;
  } cases[] = {
      {"tr(sz rho)", Functional::linear(pauli::z()), plus, 0.0},
      {"tr(sx rho)", Functional::linear(pauli::x()), plus, -2.0},
      {"tr(rho^2)", Functional::quadratic(pauli::identity()), states::maximally_mixed(2), 2.0},
  };
  Verdict v{true, ""};
  for (const auto& c : cases) {
    const DynkinReport d = dynkin_check(c.g, c.rho, model, u, 10.0 * cfg.dt, cfg, mc);
    v.pass = v.pass && d.within_tolerance(3.0) && std::abs(d.generator_value - c.exact) < 1e-10;
    v.detail += fmt("%s: D=%.3g mc=%.4f se=%.4f bias=%.3g; ", c.name, d.generator_value, d.mc_estimate,
                    d.standard_error, d.bias_bound);
  }
  return v;
}

Verdict criterion7(int threads) {
  const SdeModel model = ising_qubit_model();
  const DensityOperator rho0 = bloch_to_density({0.6, 0.0, 0.3});
  CostSpec cost;
  cost.terminal = Functional::linear(-states::ground().matrix(), 1.0);
  IntegratorConfig cfg;
  cfg.dt = 5e-3;
  cfg.horizon = 1.0;
  DppConfig dc;
  dc.master_seed = kSeed + 7;
  dc.threads = threads;
  const DppReport d = dpp_check(rho0, model, cost, ControlGrid{{-1.0, 0.0, 1.0}, 10.0}, 0.5, cfg, dc);
  const DppReport z = dpp_check(rho0, model, cost, ControlGrid{{0.0}, 10.0}, 0.5, cfg, dc);
  const double oracle = cost.terminal(lindblad_ode(rho0, model, nullptr, cfg).states.back());
  const bool three = std::abs(d.gap) <= d.tolerance;
  const bool degenerate = std::abs(z.gap) <= z.tolerance && std::abs(z.lhs - oracle) <= 3.0 * z.lhs_se &&
                          std::abs(z.rhs - oracle) <= 3.0 * z.rhs_se;
  return {three && degenerate,
          fmt("grid {-1,0,1}: lhs %.4f rhs %.4f gap %.4f tol %.4f; grid {0}: lhs %.4f rhs %.4f lindblad %.4f tol %.4f",
              d.lhs, d.rhs, d.gap, d.tolerance, z.lhs, z.rhs, oracle, z.tolerance)};
}

Verdict criterion8(int threads) {
  // gamma follows the closed-loop mean-field dynamics, with A^{E gamma_t}
  // taken from the Picard fixed point
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  const DensityOperator rho0 = states::maximally_mixed(2);
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  PicardConfig pc;
  pc.ensemble_size = 1000;
  pc.master_seed = kSeed + 8;
  pc.threads = threads;
  const PicardResult xi = picard_solve(rho0, ising_qubit_model(), ising_kernel(), law.policy(), cfg, pc);

  SdeModel model = ising_qubit_model();
  model.mean_field = meanfield_hook(ising_kernel(), xi.flow);
  cfg.record_every = 10;
  EnsembleConfig ens;
  ens.trajectories = 1000;
  ens.master_seed = kSeed + 80;
  ens.threads = threads;
  const DensityOperator target = states::ground();
  ens.observables.push_back({"V", [target](StateView g) { return lyapunov(g, target); }});
  const EnsembleSummary s = simulate_ensemble(rho0, model, law.policy(), cfg, ens);
  int hits = 0;
  for (const auto& g : s.terminal) hits += g.overlap(target) > 0.99;
  const double frac = static_cast<double>(hits) / ens.trajectories;
  const Eigen::VectorXd v = s.observable_mean.col(s.observable_index("V"));
  const LyapunovReport fit = fit_exponential_rate(s.times, {v.data(), v.data() + v.size()}, 2.5, 4.0);
  return {xi.converged && frac >= 0.95 && fit.fitted_rate < 0.0 && fit.r_squared > 0.9,
          fmt("picard %s in %d; fidelity>0.99 on %.3f; V rate %.3f on [2.5,4], R^2 %.4f",
              xi.converged ? "converged" : "not converged", xi.iterations, frac, fit.fitted_rate, fit.r_squared)};
}

Verdict criterion9(int threads) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  const DensityOperator rho0 = states::maximally_mixed(2);
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 10.0);
  PicardConfig pc;
  pc.master_seed = kSeed + 9;
  pc.threads = threads;
  const PicardResult p = picard_solve(rho0, ising_qubit_model(), ising_kernel(), law.policy(), cfg, pc);
  bool decreasing = true;
  for (std::size_t k = 1; k < p.residuals.size(); ++k) decreasing = decreasing && p.residuals[k] < p.residuals[k - 1];
  std::string res;
  for (double r : p.residuals) res += fmt("%.3g ", r);

  // Independent draws per iteration expose the Monte-Carlo floor.
  std::map<int, double> floor;
  for (int m : {400, 1600}) {
    PicardConfig f = pc;
    f.ensemble_size = m;
    f.common_random_numbers = false;
    f.tolerance = 1e-9;
    f.max_iterations = 10;
    const PicardResult q = picard_solve(rho0, ising_qubit_model(), ising_kernel(), law.policy(), cfg, f);
    double sum = 0.0;
    for (std::size_t k = 4; k < q.residuals.size(); ++k) sum += q.residuals[k];
    floor[m] = sum / static_cast<double>(q.residuals.size() - 4);
  }
  const double ratio = floor[400] / floor[1600];
  return {p.converged && p.iterations <= 20 && decreasing && ratio >= 1.5 && ratio <= 2.7,
          fmt("M=2000 residuals [%s] in %d iterations; floor M=400 %.4g, M=1600 %.4g, ratio %.3f (sqrt 4 = 2)",
              res.c_str(), p.iterations, floor[400], floor[1600], ratio)};
}

Verdict criterion10(int threads) {
  const NBodyModel model = assemble_nbody(2);
  const TwoQubitLaws laws = twoqubit_laws(5.0, 1.0, 10.0);
  const DensityOperator rho0 = states::maximally_mixed(4);
  const DensityOperator target = states::product("ge");
  const std::vector<DensityOperator> corners{states::product("ee"), states::product("eg"), states::product("ge"),
                                             states::product("gg")};
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 8.0;
  cfg.record_every = static_cast<int>(cfg.steps());
  const int m = 500;

  auto terminals = [&](const ControlPolicy& policy, std::uint64_t master) {
    std::vector<ComplexMatrix> out(m);
    parallel_for(m, threads, [&](int i) {
      IntegratorConfig c = cfg;
      c.seed = trajectory_seed(master, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = nbody_simulate(rho0, model, policy, c).states.back().matrix();
    });
    return out;
  };

  int at_target = 0;
  for (const auto& r : terminals(site_feedback_policy({laws.alice, laws.bob}), kSeed + 10))
    at_target += (r * target.matrix()).trace().real() > 0.95;
  int near_f = 0;
  for (const auto& r : terminals(nullptr, kSeed + 100)) {
    double best = 1e9;
    for (const auto& c : corners) best = std::min(best, hs_distance(r, c.matrix()));
    near_f += best < 0.05;
  }
  const double a = static_cast<double>(at_target) / m, b = static_cast<double>(near_f) / m;
  return {a >= 0.90 && b >= 0.99, fmt("closed loop: fidelity>0.95 on %.3f; open loop: within 0.05 of F on %.3f", a, b)};
}

Verdict criterion11(int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 3.0;
  cfg.record_every = 10;
  cfg.repair_positivity = false;
  ChaosConfig cc;
  cc.master_seed = kSeed + 11;
  cc.threads = threads;
  cc.picard.master_seed = kSeed + 11;
  cc.picard.threads = threads;
  const ChaosReport r = chaos_experiment(bloch_to_density({0.8, 0.0, 0.0}), cfg, cc);
  const double seconds = seconds_since(t0);
  std::string d;
  for (std::size_t k = 0; k < r.sizes.size(); ++k)
    d += fmt("N=%d %.4f (se %.4f); ", r.sizes[k], r.distances[k], r.standard_errors[k]);
  return {r.non_increasing(2.0) && seconds <= 900.0, d + fmt("%.1f s", seconds)};
}

int run_command(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Verdict criterion12(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "qfl_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::map<std::string, std::string> configs{
      {"stabilize", R"({"experiment": "stabilize", "dt": 1e-3, "horizon": 2.0, "record_every": 20,
        "trajectories": 64, "seed": 99, "initial": [0.2, -0.1, 0.4]})"},
      {"twoqubit", R"({"experiment": "twoqubit-stabilize", "dt": 1e-3, "horizon": 1.0, "record_every": 20,
        "trajectories": 32, "seed": 99})"},
      {"picard", R"({"experiment": "picard", "dt": 1e-2, "horizon": 1.0, "record_every": 10,
        "picard_ensemble": 200, "feedback": true, "seed": 99})"},
  };
  int files = 0, differ = 0;
  bool ok = true;
  for (const auto& [name, body] : configs) {
    const fs::path cfg = dir / (name + ".json");
    std::ofstream(cfg) << body;
    for (const char* run : {"a", "b"}) {
      const std::string threads = run[0] == 'a' ? "1" : "0";
      const int code = run_command(cli + " --threads " + threads + " --out " + (dir / (name + "_" + run)).string() +
                                   " run " + cfg.string());
      ok = ok && code == 0;
    }
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string f = e.path().filename().string();
      const std::string prefix = name + "_a_";
      if (f.rfind(prefix, 0) != 0 || e.path().extension() != ".csv") continue;
      ++files;
      differ += slurp(e.path()) != slurp(dir / (name + "_b_" + f.substr(prefix.size())));
    }
  }
  fs::remove_all(dir);
  return {ok && files > 0 && differ == 0, fmt("%d CSV files over 3 configs, %d differ", files, differ)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfl acceptance criteria"};
  std::string cli = QFL_CLI_PATH;
  int threads = 0;
  std::vector<int> only;
  app.add_option("--cli", cli, "path of the qfl executable");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("criteria", only, "criteria to run (default: all)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);
  if (threads == 0) threads = default_thread_count();

  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}
                                              : std::set<int>(only.begin(), only.end());
  const char* names[] = {"",          "state-reduction", "martingale",  "lindblad-mean", "bloch-matrix",
                         "lipschitz", "dynkin",          "dpp",         "stabilization", "picard",
                         "two-qubit", "chaos",           "determinism"};

  std::vector<ReductionRun> reduction;
  if (selected.count(1) || selected.count(2)) reduction = reduction_runs(threads);

  const std::map<int, std::function<Verdict()>> checks{
      {1, [&] { return criterion1(reduction); }}, {2, [&] { return criterion2(reduction); }},
      {3, [&] { return criterion3(threads); }},   {4, [] { return criterion4(); }},
      {5, [] { return criterion5(); }},           {6, [&] { return criterion6(threads); }},
      {7, [&] { return criterion7(threads); }},   {8, [&] { return criterion8(threads); }},
      {9, [&] { return criterion9(threads); }},   {10, [&] { return criterion10(threads); }},
      {11, [&] { return criterion11(threads); }}, {12, [&] { return criterion12(cli); }},
  };

  int failed = 0;
  for (int id : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = checks.at(id)();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2d %-15s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, names[id], v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
