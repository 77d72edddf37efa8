#include "qfl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "qfl/errors.hpp"
#include "qfl/noise.hpp"
#include "sme_kernel.hpp"

namespace qfl {

namespace {

constexpr int kBlock = 32;

struct Accumulator {
  std::vector<ComplexMatrix> state_sum;
  Eigen::MatrixXd sum;
  Eigen::MatrixXd sum_sq;
  long steps = 0;
  long repairs = 0;

  void reset(std::size_t nt, Eigen::Index nobs) {
    state_sum.assign(nt, ComplexMatrix());
    sum.setZero(static_cast<Eigen::Index>(nt), nobs);
    sum_sq.setZero(static_cast<Eigen::Index>(nt), nobs);
    steps = repairs = 0;
  }

  void add(std::size_t k, StateView m) {
    if (state_sum[k].size() == 0) {
      state_sum[k] = m;
    } else {
      state_sum[k] += m;
    }
  }

  void merge(const Accumulator& o) {
    for (std::size_t k = 0; k < state_sum.size(); ++k) {
      if (o.state_sum[k].size() == 0) continue;
      add(k, o.state_sum[k]);
    }
    sum += o.sum;
    sum_sq += o.sum_sq;
    steps += o.steps;
    repairs += o.repairs;
  }
};

void run_waves(int count, int threads, int block, const std::function<void(int, int)>& do_block,
               const std::function<void(int)>& after_block) {
  const int nblocks = (count + block - 1) / block;
  threads = std::max(1, threads);
  for (int first = 0; first < nblocks; first += threads) {
    const int last = std::min(nblocks, first + threads);
    if (last - first == 1) {
      do_block(first, 0);
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr error;
      std::mutex mu;
      for (int b = first; b < last; ++b) {
        pool.emplace_back([&, b] {
          try {
            do_block(b, b - first);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!error) error = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (error) std::rethrow_exception(error);
    }
    if (after_block) {
      for (int b = first; b < last; ++b) after_block(b - first);
    }
  }
}

}  // namespace

int default_thread_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn, int block) {
  if (count <= 0) return;
  run_waves(
      count, threads, std::max(1, block),
      [&](int b, int) {
        const int end = std::min(count, (b + 1) * block);
        for (int i = b * block; i < end; ++i) fn(i);
      },
      nullptr);
}

Observable expectation_observable(std::string name, ComplexMatrix op) {
  return {std::move(name), [op = std::move(op)](StateView rho) {
            return (rho.array() * op.transpose().array()).sum().real();
          }};
}

void EnsembleConfig::validate() const {
  if (trajectories < 1) throw InvalidArgument("ensemble size must be >= 1");
  if (threads < 1) throw InvalidArgument("thread count must be >= 1");
  for (const auto& o : observables) {
    if (!o.evaluate) throw InvalidArgument("observable '" + o.name + "' has no evaluator");
  }
}

double EnsembleSummary::standard_error(Eigen::Index time_index, Eigen::Index observable) const {
  return std::sqrt(std::max(0.0, observable_variance(time_index, observable)) / trajectories);
}

Eigen::Index EnsembleSummary::observable_index(const std::string& name) const {
  for (std::size_t i = 0; i < observable_names.size(); ++i) {
    if (observable_names[i] == name) return static_cast<Eigen::Index>(i);
  }
  throw InvalidArgument("unknown observable '" + name + "'");
}

EnsembleSummary run_ensemble(const std::vector<double>& times, const EnsembleConfig& ens, const PathRunner& runner) {
  ens.validate();
  const std::size_t nt = times.size();
  const auto nobs = static_cast<Eigen::Index>(ens.observables.size());
  const int nthreads = std::max(1, ens.threads);

  EnsembleSummary out;
  out.times = times;
  out.trajectories = ens.trajectories;
  for (const auto& o : ens.observables) out.observable_names.push_back(o.name);
  std::vector<std::optional<DensityOperator>> terminal(ens.keep_terminal ? ens.trajectories : 0);

  Accumulator total;
  total.reset(nt, nobs);
  std::vector<Accumulator> slots(static_cast<std::size_t>(nthreads));

  auto do_block = [&](int b, int slot) {
    Accumulator& acc = slots[static_cast<std::size_t>(slot)];
    acc.reset(nt, nobs);
    const int end = std::min(ens.trajectories, (b + 1) * kBlock);
    for (int i = b * kBlock; i < end; ++i) {
      ComplexMatrix last;
      RecordSink sink = [&](std::size_t k, StateView rho) {
        ComplexMatrix reduced;
        if (ens.reducer) reduced = ens.reducer(rho);
        const StateView r = ens.reducer ? StateView(reduced) : rho;
        for (Eigen::Index j = 0; j < nobs; ++j) {
          const double v = ens.observables[static_cast<std::size_t>(j)].evaluate(r);
          acc.sum(static_cast<Eigen::Index>(k), j) += v;
          acc.sum_sq(static_cast<Eigen::Index>(k), j) += v * v;
        }
        if (k + 1 == nt && ens.keep_terminal) last = r;
        acc.add(k, r);
      };
      const PathOutcome po = runner(trajectory_seed(ens.master_seed, static_cast<std::uint64_t>(i)), sink);
      acc.steps += po.steps;
      acc.repairs += po.repairs;
      if (ens.keep_terminal) terminal[static_cast<std::size_t>(i)] = DensityOperator::trusted(std::move(last));
    }
  };
  run_waves(ens.trajectories, nthreads, kBlock, do_block,
            [&](int slot) { total.merge(slots[static_cast<std::size_t>(slot)]); });

  const double m = ens.trajectories;
  out.mean_state.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) out.mean_state[k] = total.state_sum[k] / m;
  out.observable_mean = total.sum / m;
  if (ens.trajectories > 1) {
    out.observable_variance =
        ((total.sum_sq - total.sum.cwiseProduct(total.sum) / m) / (m - 1.0)).cwiseMax(0.0);
  } else {
    out.observable_variance.setZero(static_cast<Eigen::Index>(nt), nobs);
  }
  out.steps = total.steps;
  out.repairs = total.repairs;
  for (auto& t : terminal) out.terminal.push_back(std::move(*t));
  return out;
}

namespace {

class SinkObserver : public detail::PathObserver {
 public:
  explicit SinkObserver(const RecordSink& sink) : sink_(sink) {}
  void on_record(std::size_t k, double, StateView rho, std::span<const double>) override { sink_(k, rho); }

 private:
  const RecordSink& sink_;
};

}  // namespace

EnsembleSummary simulate_ensemble(const DensityOperator& rho0, const SdeModel& model, const ControlPolicy& policy,
                                  const IntegratorConfig& cfg, const EnsembleConfig& ens) {
  model.validate();
  cfg.validate();
  require_same_dim(rho0.matrix(), model.hamiltonian, "simulate_ensemble");
  const PathRunner runner = [&](std::uint64_t seed, const RecordSink& sink) {
    SinkObserver obs(sink);
    const detail::PathStats s = detail::integrate_path(rho0.matrix(), model, policy, cfg, seed, obs);
    return PathOutcome{s.steps, s.repairs};
  };
  return run_ensemble(cfg.record_times(), ens, runner);
}

}  // namespace qfl
