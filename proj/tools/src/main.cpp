#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qfl/errors.hpp"
#include "qfl/experiments/config.hpp"
#include "qfl/experiments/runner.hpp"
#include "qfl/experiments/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

namespace ex = qfl::experiments;

int run(const std::string& path, const std::optional<std::string>& out, const std::optional<int>& threads,
        const std::optional<std::uint64_t>& seed) {
  ex::ExperimentConfig cfg;
  try {
    cfg = ex::load_config(path);
    if (out) cfg.output = *out;
    if (threads) cfg.threads = *threads;
    if (seed) cfg.seed = *seed;
    cfg.validate();
  } catch (const ex::ConfigError& e) {
    std::cerr << "qfl: invalid config: " << e.what() << '\n';
    return kValidation;
  }

  ex::RunResult result;
  try {
    result = ex::run_experiment(cfg);
  } catch (const qfl::IntegrationBlowup& e) {
    std::cerr << "qfl: numerical failure at t=" << e.time() << ": " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qfl: invalid config: " << e.what() << '\n';
    return kValidation;
  }

  for (const auto& p : ex::write_outputs(cfg, result)) std::cout << p << '\n';
  if (!result.converged) {
    std::cerr << "qfl: " << result.diagnostic << '\n';
    return kNumerical;
  }
  return kOk;
}

int verify(const std::string& suite, const std::optional<std::string>& out, const std::optional<int>& threads,
           const std::optional<std::uint64_t>& seed) {
  ex::SuiteReport rep;
  try {
    rep = ex::run_suite(suite, seed.value_or(20240501), threads.value_or(0));
  } catch (const ex::ConfigError& e) {
    std::cerr << "qfl: " << e.what() << '\n';
    return kValidation;
  } catch (const qfl::IntegrationBlowup& e) {
    std::cerr << "qfl: numerical failure at t=" << e.time() << ": " << e.what() << '\n';
    return kNumerical;
  }
  const std::string text = rep.to_json().dump(2);
  std::cout << text << '\n';
  if (out) {
    std::ofstream f(*out + "_verify_" + suite + ".json", std::ios::binary);
    f << text << '\n';
  }
  return rep.pass() ? kOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfl: quantum filtering and feedback experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out, "output path prefix (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "master seed (overrides the config)");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "experiment JSON")->required();

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
  verify_cmd->add_option("suite", suite, "invariants | lipschitz (alias lemma) | dynkin | dpp | picard | chaos")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (*run_cmd) return run(config_path, out, threads, seed);
  return verify(suite, out, threads, seed);
}
