#include <benchmark/benchmark.h>

#include <vector>

#include "qfl/qfl.hpp"

namespace {

void BM_QubitTrajectory(benchmark::State& state) {
  const qfl::SdeModel model = qfl::ising_qubit_model();
  const auto rho0 = qfl::states::maximally_mixed(2);
  qfl::IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 1.0;
  cfg.record_every = 10000;
  qfl::EnsembleConfig ens;
  ens.trajectories = 8;
  for (auto _ : state) {
    auto s = qfl::simulate_ensemble(rho0, model, nullptr, cfg, ens);
    benchmark::DoNotOptimize(s.mean_state.back());
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps() * ens.trajectories);
}
BENCHMARK(BM_QubitTrajectory)->Unit(benchmark::kMillisecond);

void BM_QubitFeedback(benchmark::State& state) {
  const qfl::SdeModel model = qfl::ising_qubit_model();
  const auto law = qfl::FeedbackLaw::mean_field_stabilizer(qfl::states::ground(), 5.0, 1.0, 10.0);
  const auto rho0 = qfl::states::maximally_mixed(2);
  qfl::IntegratorConfig cfg;
  cfg.horizon = 1.0;
  cfg.record_every = 10000;
  qfl::EnsembleConfig ens;
  ens.trajectories = 8;
  const auto policy = law.policy();
  for (auto _ : state) {
    auto s = qfl::simulate_ensemble(rho0, model, policy, cfg, ens);
    benchmark::DoNotOptimize(s.mean_state.back());
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps() * ens.trajectories);
}
BENCHMARK(BM_QubitFeedback)->Unit(benchmark::kMillisecond);

void BM_TwoQubitDense(benchmark::State& state) {
  const qfl::NBodyModel nb = qfl::assemble_nbody(2);
  const qfl::SdeModel model = nb.as_sde_model();
  const auto rho0 = qfl::states::maximally_mixed(4);
  qfl::IntegratorConfig cfg;
  cfg.horizon = 0.5;
  cfg.record_every = 10000;
  qfl::EnsembleConfig ens;
  ens.trajectories = 4;
  for (auto _ : state) {
    auto s = qfl::simulate_ensemble(rho0, model, nullptr, cfg, ens);
    benchmark::DoNotOptimize(s.mean_state.back());
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps() * ens.trajectories);
}
BENCHMARK(BM_TwoQubitDense)->Unit(benchmark::kMillisecond);

void BM_BlochStep(benchmark::State& state) {
  Eigen::Vector3d v(0.3, 0.1, 0.2);
  double dw = 1e-2;
  for (auto _ : state) {
    qfl::bloch_step(v, 0.1, 0.5, dw, 1e-4);
    dw = -dw;
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_BlochStep);

void BM_NBodyStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const qfl::NBodyModel model = qfl::assemble_nbody(n);
  const auto rho0 = qfl::tensor_power(qfl::bloch_to_density({0.8, 0.0, 0.0}), n);
  qfl::IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.1;
  cfg.repair_positivity = false;
  cfg.record_every = 1000;
  qfl::EnsembleConfig ens;
  ens.trajectories = 1;
  for (auto _ : state) {
    auto s = qfl::nbody_ensemble(rho0, model, nullptr, cfg, ens);
    benchmark::DoNotOptimize(s.mean_state.back());
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps());
}
BENCHMARK(BM_NBodyStep)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
