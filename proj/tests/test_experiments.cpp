#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "qfl/experiments/config.hpp"
#include "qfl/experiments/runner.hpp"
#include "qfl/experiments/table.hpp"
#include "qfl/experiments/verify.hpp"

using namespace qfl::experiments;
using nlohmann::json;

namespace {

ExperimentConfig small(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.dt = 1e-3;
  c.horizon = 0.5;
  c.record_every = 50;
  c.trajectories = 20;
  c.trace_count = 2;
  c.threads = 1;
  return c;
}

const ResultTable& table(const RunResult& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name() == name) return t;
  throw std::runtime_error("missing table " + name);
}

}  // namespace

TEST(Config, ExperimentNames) {
  for (Experiment e : {Experiment::reduction, Experiment::stabilize, Experiment::twoqubit_reduction,
                       Experiment::twoqubit_stabilize, Experiment::chaos, Experiment::picard, Experiment::dynkin,
                       Experiment::dpp, Experiment::lipschitz}) {
    EXPECT_EQ(experiment_from_string(to_string(e)), e);
  }
  EXPECT_EQ(to_string(Experiment::twoqubit_reduction), "twoqubit-reduction");
  EXPECT_THROW(experiment_from_string("teleport"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.experiment = Experiment::chaos;
  c.dt = 2e-3;
  c.sizes = {2, 3};
  c.initial = {0.8, 0.0, 0.0};
  c.seed = 123456789012345ULL;
  c.output = "out/x";
  const ExperimentConfig back = config_from_json(to_json(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_from_json(json::parse(to_json(c).dump())), c);
}

TEST(Config, MissingKeysKeepDefaults) {
  const ExperimentConfig c = config_from_json(json{{"experiment", "stabilize"}});
  ExperimentConfig d;
  d.experiment = Experiment::stabilize;
  EXPECT_EQ(c, d);
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(config_from_json(json{{"experiment", "reduction"}, {"dtt", 1e-3}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"dt", "small"}}), ConfigError);
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
}

TEST(Config, ValidationErrors) {
  ExperimentConfig c = small(Experiment::reduction);
  EXPECT_NO_THROW(c.validate());
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::reduction);
  c.horizon = 0.5005;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::reduction);
  c.initial = {1.0, 1.0, 0.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::reduction);
  c.trajectories = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::stabilize);
  c.kappa1 = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::stabilize);
  c.target = "sideways";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::twoqubit_reduction);
  c.two_qubit_initial = "gx";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::chaos);
  c.sizes = {2, 40};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::dpp);
  c.grid = {1.0, -1.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small(Experiment::lipschitz);
  c.dims = {3};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Table, CsvFormat) {
  ResultTable t("demo", {"t", "x"});
  t.add_row({0.0, 0.1});
  t.add_row({1e-4, -2.5});
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
  std::ostringstream os;
  t.write_csv(os);
  EXPECT_EQ(os.str(), "t,x\n0,0.1\n1e-04,-2.5\n");
}

TEST(Table, NumberFormatting) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(3.0), "3");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Runner, ReductionTablesAndStats) {
  const RunResult r = run_experiment(small(Experiment::reduction));
  const ResultTable& ens = table(r, "ensemble");
  EXPECT_EQ(ens.columns().front(), "t");
  EXPECT_EQ(ens.rows().size(), 11u);
  EXPECT_EQ(table(r, "terminal").rows().size(), 20u);
  EXPECT_EQ(table(r, "traces").rows().size(), 2u * 11u);
  EXPECT_EQ(r.results["excited"].get<int>() + r.results["ground"].get<int>() + r.results["undecided"].get<int>(), 20);
  EXPECT_TRUE(r.converged);
}

TEST(Runner, ThreadCountInvariant) {
  ExperimentConfig c = small(Experiment::stabilize);
  const RunResult a = run_experiment(c);
  c.threads = 3;
  const RunResult b = run_experiment(c);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    std::ostringstream x, y;
    a.tables[i].write_csv(x);
    b.tables[i].write_csv(y);
    EXPECT_EQ(x.str(), y.str()) << a.tables[i].name();
  }
  EXPECT_EQ(a.results, b.results);
}

TEST(Runner, TwoQubitTarget) {
  ExperimentConfig c = small(Experiment::twoqubit_stabilize);
  c.two_qubit_initial = "ge";
  const RunResult r = run_experiment(c);
  EXPECT_DOUBLE_EQ(r.results["target_fraction"].get<double>(), 1.0);
}

TEST(Runner, PicardReportsConvergence) {
  ExperimentConfig c = small(Experiment::picard);
  c.initial = {0.0, 0.0, -1.0};
  c.picard_ensemble = 100;
  const RunResult r = run_experiment(c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(table(r, "residuals").rows().size(), 1u);
}

TEST(Runner, ReportShape) {
  const ExperimentConfig c = small(Experiment::lipschitz);
  ExperimentConfig l = c;
  l.samples = 200;
  const RunResult r = run_experiment(l);
  const json rep = make_report(l, r);
  EXPECT_EQ(config_from_json(rep["config"]), l);
  EXPECT_TRUE(rep.contains("build"));
  EXPECT_EQ(rep["seed"].get<std::uint64_t>(), l.seed);
  EXPECT_TRUE(rep["results"].is_object());
}

TEST(Verify, UnknownSuite) { EXPECT_THROW(run_suite("nope", 1, 1), ConfigError); }

TEST(Verify, InvariantsPass) {
  const SuiteReport r = run_suite("invariants", 20240501, 1);
  EXPECT_TRUE(r.pass()) << r.to_json().dump(2);
  EXPECT_TRUE(r.to_json()["pass"].get<bool>());
}
