#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"
#include "qfl/feedback.hpp"
#include "qfl/lyapunov.hpp"

using namespace qfl;

TEST(MeanFieldFeedback, Examples) {
  const FeedbackLaw one = FeedbackLaw::mean_field_stabilizer(states::ground(), 1.0, 1.0, 10.0);
  EXPECT_EQ(meanfield_feedback(states::ground(), one), 0.0);
  EXPECT_NEAR(meanfield_feedback(states::excited(), one), 1.0, 1e-15);
  const FeedbackLaw two = FeedbackLaw::mean_field_stabilizer(states::ground(), 2.0, 7.0, 10.0);
  EXPECT_NEAR(meanfield_feedback(bloch_to_density({0.0, 0.5, 0.0}), two), 1.0, 1e-15);
}

TEST(MeanFieldFeedback, CommutatorTermIsReal) {
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 5.0, 1.0, 100.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const DensityOperator g = random_density(2, rng);
    EXPECT_LT(std::abs(law.raw(g.matrix()).imag()), 1e-14);
    // k1 (1 - tr(g rho_g)) - i k2 tr([sy, g] rho_g) = 5 (1 + z)/2 + 2 x
    const Eigen::Vector3d v = bloch_components(g.matrix());
    EXPECT_NEAR(law(g.matrix()), 2.5 * (1.0 + v.z()) + 1.0 * v.x(), 1e-13) << v.transpose();
  }
}

TEST(MeanFieldFeedback, Saturates) {
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 50.0, 0.0, 10.0);
  EXPECT_EQ(law(states::excited().matrix()), 10.0);
  EXPECT_TRUE(law.clips(states::excited().matrix()));
  EXPECT_FALSE(law.clips(states::ground().matrix()));
}

TEST(MeanFieldFeedback, RejectsBadInputs) {
  EXPECT_THROW(FeedbackLaw::mean_field_stabilizer(states::ground(), -1.0, 1.0, 10.0), InvalidArgument);
  EXPECT_THROW(FeedbackLaw::mean_field_stabilizer(states::ground(), 1.0, 1.0, 0.0), InvalidArgument);
  const FeedbackLaw law = FeedbackLaw::mean_field_stabilizer(states::ground(), 1.0, 1.0, 10.0);
  EXPECT_THROW(meanfield_feedback(states::maximally_mixed(4), law), DimensionError);
}

TEST(ZeroLaw, AlwaysZero) {
  const FeedbackLaw z = FeedbackLaw::zero();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(z(random_density(2, rng).matrix()), 0.0);
}

TEST(TwoQubit, AtTarget) {
  const auto [a, b] = twoqubit_feedbacks(states::product("ge"), twoqubit_laws(5.0, 1.0, 10.0));
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(TwoQubit, BothExcited) {
  const auto [a, b] = twoqubit_feedbacks(states::product("ee"), twoqubit_laws(1.0, 1.0, 10.0));
  EXPECT_NEAR(a, 1.0, 1e-15);
  EXPECT_NEAR(b, 0.0, 1e-15);
}

TEST(TwoQubit, GlobalEqualsReduced) {
  const TwoQubitLaws laws = twoqubit_laws(5.0, 1.0, 10.0);
  std::mt19937_64 rng(19);
  for (int i = 0; i < 500; ++i) {
    const DensityOperator rho = i % 2 ? random_pure(4, rng) : random_density(4, rng);
    const auto [ga, gb] = twoqubit_feedbacks(rho, laws);
    const auto [ra, rb] = twoqubit_feedbacks(partial_trace(rho, 1, 2), partial_trace(rho, 2, 2), laws);
    EXPECT_NEAR(ga, ra, 1e-12);
    EXPECT_NEAR(gb, rb, 1e-12);
  }
}

TEST(TwoQubit, RejectsWrongDimensions) {
  const TwoQubitLaws laws = twoqubit_laws(5.0, 1.0, 10.0);
  EXPECT_THROW(twoqubit_feedbacks(states::excited(), laws), DimensionError);
}

TEST(Lyapunov, Examples) {
  EXPECT_EQ(lyapunov(states::ground(), states::ground()), 0.0);
  EXPECT_NEAR(lyapunov(states::maximally_mixed(2), states::ground()), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(lyapunov(states::excited(), states::ground()), 1.0, 1e-15);
}

TEST(FitRate, SyntheticExponential) {
  std::vector<double> t, v;
  for (int k = 0; k <= 500; ++k) {
    t.push_back(0.01 * k);
    v.push_back(std::exp(-3.0 * t.back()));
  }
  const LyapunovReport r = fit_exponential_rate(t, v);
  EXPECT_NEAR(r.fitted_rate, -3.0, 1e-9);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(r.window_begin, 2.5, 1e-12);
  EXPECT_NEAR(r.window_end, 4.0, 1e-12);
}

TEST(FitRate, RejectsVanishingWindow) {
  std::vector<double> t{0.0, 1.0, 2.0, 3.0}, v{1.0, 0.5, 0.0, 0.0};
  EXPECT_THROW(fit_exponential_rate(t, v, 1.0, 3.0), InvalidArgument);
  EXPECT_THROW(fit_exponential_rate(t, v, 0.1, 0.2), InvalidArgument);
}

TEST(Reduction, Classification) {
  std::vector<DensityOperator> terminal{states::excited(), states::ground(), states::ground(),
                                        states::maximally_mixed(2)};
  const ReductionReport r = detect_reduction(terminal);
  EXPECT_EQ(r.excited, 1);
  EXPECT_EQ(r.ground, 2);
  EXPECT_EQ(r.undecided, 1);
  EXPECT_EQ(r.outcomes[3], Outcome::undecided);
  EXPECT_DOUBLE_EQ(r.classified_fraction(), 0.75);
  EXPECT_DOUBLE_EQ(r.excited_frequency(), 0.25);
}
