#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qfl/dpp.hpp"
#include "qfl/errors.hpp"
#include "qfl/generator.hpp"

using namespace qfl;

namespace {

const std::vector<double> kNoControl{0.0};

DensityOperator plus_x() { return bloch_to_density({1.0, 0.0, 0.0}); }

}  // namespace

TEST(Functional, Evaluation) {
  const DensityOperator rho = bloch_to_density({0.2, 0.1, -0.4});
  EXPECT_DOUBLE_EQ(Functional::constant(3.5)(rho), 3.5);
  EXPECT_NEAR(Functional::linear(pauli::z())(rho), -0.4, 1e-15);
  EXPECT_NEAR(Functional::linear(pauli::x(), 1.0)(rho), 1.2, 1e-15);
  EXPECT_NEAR(Functional::quadratic(pauli::identity())(rho), rho.purity(), 1e-15);
  const Functional c = Functional::custom([](const ComplexMatrix& m) { return m(0, 0).real(); });
  EXPECT_NEAR(c(rho), 0.3, 1e-15);
}

TEST(Frechet, Examples) {
  const Functional g = Functional::linear(pauli::z());
  const DensityOperator rho = states::maximally_mixed(2);
  EXPECT_NEAR(frechet_gradient(g, rho.matrix(), pauli::x() / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(frechet_gradient(g, rho.matrix(), pauli::z() / std::sqrt(2.0)), std::sqrt(2.0), 1e-15);
}

TEST(Frechet, RejectsNonTracelessDirection) {
  const Functional g = Functional::linear(pauli::z());
  EXPECT_THROW(frechet_gradient(g, states::excited().matrix(), pauli::identity()), InvalidArgument);
}

TEST(Frechet, AnalyticMatchesFiniteDifferences) {
  std::mt19937_64 rng(41);
  for (int dim : {2, 4}) {
    const ComplexMatrix f = random_traceless_direction(dim, rng) + 0.3 * ComplexMatrix::Identity(dim, dim);
    ComplexMatrix c1 = ComplexMatrix::Random(dim, dim);
    const Functional gs[] = {Functional::linear(f, 0.5), Functional::quadratic(c1, f)};
    for (const auto& g : gs) {
      for (int i = 0; i < 50; ++i) {
        const DensityOperator rho = random_density(dim, rng);
        const ComplexMatrix tau = random_traceless_direction(dim, rng);
        const double a = frechet_gradient(g, rho.matrix(), tau);
        const double n = numeric_directional_derivative(g, rho.matrix(), tau);
        EXPECT_LE(std::abs(a - n), 1e-6 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST(Frechet, CustomUsesDifferences) {
  std::mt19937_64 rng(1);
  const Functional purity = Functional::quadratic(pauli::identity());
  const Functional custom = Functional::custom([](const ComplexMatrix& m) { return (m * m).trace().real(); });
  for (int i = 0; i < 20; ++i) {
    const DensityOperator rho = random_density(2, rng);
    const ComplexMatrix tau = random_traceless_direction(2, rng);
    EXPECT_NEAR(frechet_gradient(custom, rho.matrix(), tau), frechet_gradient(purity, rho.matrix(), tau), 1e-8);
  }
}

TEST(Generator, ClosedForms) {
  const SdeModel m = ising_qubit_model();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(generator_apply(Functional::linear(pauli::z()), random_density(2, rng).matrix(), kNoControl, m), 0.0,
                1e-14);
  }
  EXPECT_NEAR(generator_apply(Functional::linear(pauli::x()), plus_x().matrix(), kNoControl, m), -2.0, 1e-14);
  EXPECT_NEAR(generator_apply(Functional::quadratic(pauli::identity()), states::maximally_mixed(2).matrix(),
                              kNoControl, m),
              2.0, 1e-14);
}

TEST(Generator, ConstantFunctionalIsZero) {
  const SdeModel m = ising_qubit_model();
  std::mt19937_64 rng(7);
  const std::vector<double> u{1.3};
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(generator_apply(Functional::constant(4.0), random_density(2, rng).matrix(), u, m), 0.0);
  }
}

TEST(Generator, CustomAgreesWithAnalytic) {
  const SdeModel m = ising_qubit_model();
  const Functional custom = Functional::custom([](const ComplexMatrix& r) { return (r * r).trace().real(); });
  const DensityOperator rho = bloch_to_density({0.3, -0.2, 0.4});
  const std::vector<double> u{0.5};
  EXPECT_NEAR(generator_apply(custom, rho.matrix(), u, m),
              generator_apply(Functional::quadratic(pauli::identity()), rho.matrix(), u, m), 1e-6);
}

TEST(Dynkin, StationaryState) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const DynkinReport d = dynkin_check(Functional::linear(pauli::x()), states::excited(), ising_qubit_model(),
                                      kNoControl, 1e-2, cfg, {500, 3, 1});
  EXPECT_EQ(d.generator_value, 0.0);
  EXPECT_NEAR(d.mc_estimate, 0.0, 1e-12);
  EXPECT_TRUE(d.within_tolerance());
}

TEST(Dynkin, CoherenceCase) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const DynkinReport d =
      dynkin_check(Functional::linear(pauli::x()), plus_x(), ising_qubit_model(), kNoControl, 1e-2, cfg, {2000, 4, 1});
  EXPECT_NEAR(d.generator_value, -2.0, 1e-12);
  EXPECT_TRUE(d.within_tolerance()) << d.mc_estimate << " +- " << d.standard_error;
}

TEST(Dynkin, EpsilonTooSmall) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  EXPECT_THROW(dynkin_check(Functional::linear(pauli::x()), plus_x(), ising_qubit_model(), kNoControl, 5e-3, cfg,
                            {100, 1, 1}),
               InvalidArgument);
}

TEST(Cost, ZeroSpec) {
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  const CostEstimate c = evaluate_cost(plus_x(), ising_qubit_model(), nullptr, CostSpec{}, cfg, {50, 1, 1});
  EXPECT_EQ(c.mean, 0.0);
  EXPECT_EQ(c.standard_error, 0.0);
}

TEST(Cost, ControlPenaltyIntegrates) {
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 2.0;
  CostSpec spec;
  spec.control_weight = pauli::identity();
  const CostEstimate c =
      evaluate_cost(plus_x(), ising_qubit_model(), constant_controls({0.5}), spec, cfg, {20, 1, 1});
  EXPECT_NEAR(c.mean, 0.25 * 2.0, 1e-12);
}

TEST(Cost, TerminalProjectorMartingale) {
  // tr(rho_T rho_e) has mean (1 + z0)/2 for every T under zero control
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  CostSpec spec;
  spec.terminal = Functional::linear(states::excited().matrix());
  const CostEstimate c =
      evaluate_cost(bloch_to_density({0.5, 0.0, 0.4}), ising_qubit_model(), nullptr, spec, cfg, {2000, 8, 1});
  EXPECT_NEAR(c.mean, 0.7, 3.0 * c.standard_error);
}

TEST(Dpp, DegenerateGridIsExact) {
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 0.5;
  CostSpec cost;
  cost.terminal = Functional::linear(-states::ground().matrix(), 1.0);
  DppConfig dc;
  dc.outer = 60;
  dc.inner = 20;
  dc.master_seed = 3;
  const DppReport r =
      dpp_check(bloch_to_density({0.6, 0.0, 0.3}), ising_qubit_model(), cost, ControlGrid{{0.0}, 10.0}, 0.2, cfg, dc);
  EXPECT_LE(std::abs(r.gap), r.tolerance);
  const LindbladPath lp = lindblad_ode(bloch_to_density({0.6, 0.0, 0.3}), ising_qubit_model(), nullptr, cfg);
  EXPECT_NEAR(r.lhs, cost.terminal(lp.states.back()), 3.0 * r.lhs_se + 1e-12);
}

TEST(Dpp, BudgetCap) {
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 0.5;
  DppConfig dc;
  dc.outer = 2000;
  dc.inner = 2000;
  EXPECT_THROW(dpp_check(states::maximally_mixed(2), ising_qubit_model(), CostSpec{}, ControlGrid{{-1.0, 0.0, 1.0}},
                         0.2, cfg, dc),
               BudgetExceeded);
}

TEST(Dpp, GridValidation) {
  EXPECT_THROW((ControlGrid{{}, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((ControlGrid{{1.0, 0.0}, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((ControlGrid{{0.0, 2.0}, 1.0}.validate()), InvalidArgument);
  EXPECT_NO_THROW((ControlGrid{{-1.0, 0.0, 1.0}, 1.0}.validate()));
}

TEST(FlowProperty, RestartedMatchesDirect) {
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  const FlowPropertyReport r = flow_property_check(Functional::linear(pauli::x()), bloch_to_density({0.7, 0.1, 0.2}),
                                                   ising_qubit_model(), 0.5, cfg, 200, 20, 13);
  EXPECT_TRUE(r.within_tolerance()) << r.full_mean << " vs " << r.restarted_mean;
}
