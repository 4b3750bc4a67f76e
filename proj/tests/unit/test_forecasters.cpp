#include <gtest/gtest.h>

#include <cmath>

#include "ucal/error.hpp"
#include "ucal/fixtures.hpp"
#include "ucal/forecasters.hpp"
#include "ucal/metrics.hpp"

namespace ucal {
namespace {

TEST(Logistic, SymmetryAndInverse) {
  EXPECT_DOUBLE_EQ(logistic(0.0), 0.5);
  for (double x : {-3.0, -0.2, 0.7, 5.0}) {
    EXPECT_NEAR(logistic(-x), 1.0 - logistic(x), 1e-15);
    EXPECT_NEAR(logistic_inverse(logistic(x)), x, 1e-12);
  }
}

TEST(Hedge, FirstRoundPredictsHalf) {
  ForecasterState state(2, 100, 3);
  EXPECT_EQ(forecast_hedge_step(state), 0.5);
}

TEST(Hedge, SymmetricAroundHalfMean) {
  CounterRng rng(99);
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += hedge_sample(rng.uniform_open(), 0.5, 3.0);
  EXPECT_NEAR(sum / draws, 0.5, 0.01);
}

TEST(Hedge, AtomAtOneWhenMeanIsOne) {
  // Mass at 1 is 1 - F(1^-) = 1 - S(0).
  EXPECT_NEAR(1.0 - hedge_cdf(std::nextafter(1.0, 0.0), 1.0, 10.0), 0.5, 1e-14);
  EXPECT_EQ(hedge_cdf(1.0, 1.0, 10.0), 1.0);
  EXPECT_EQ(hedge_sample(0.6, 1.0, 10.0), 1.0);
  EXPECT_LT(hedge_sample(0.4, 1.0, 10.0), 1.0);
}

TEST(Hedge, SampleInvertsCdf) {
  for (double u : {0.1, 0.3, 0.5, 0.8}) {
    const double p = hedge_sample(u, 0.4, 2.0);
    if (p > 0.0 && p < 1.0) EXPECT_NEAR(hedge_cdf(p, 0.4, 2.0), u, 1e-12);
  }
  EXPECT_EQ(hedge_sample(1e-9, 0.4, 2.0), 0.0);
}

TEST(Hedge, RejectsMulticlass) {
  ForecasterState state(3, 10, 0);
  EXPECT_THROW(forecast_hedge_step(state), ValidationError);
}

TEST(Ftpl, ForcedNoise) {
  const std::vector<std::size_t> zero{0, 0};
  const std::vector<std::uint64_t> noise{3, 1};
  const auto p = ftpl_prediction(zero, noise);
  EXPECT_DOUBLE_EQ(p[0], 0.75);
  EXPECT_DOUBLE_EQ(p[1], 0.25);
  const std::vector<std::size_t> zero3{0, 0, 0};
  const std::vector<std::uint64_t> none{0, 0, 0};
  for (double v : ftpl_prediction(zero3, none)) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  const std::vector<std::size_t> counts{2, 1};
  const std::vector<std::uint64_t> none2{0, 0};
  const auto q = ftpl_prediction(counts, none2);
  EXPECT_DOUBLE_EQ(q[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(q[1], 1.0 / 3.0);
}

TEST(Ftpl, NoiseCapIsFloorSqrtT) {
  EXPECT_EQ(ForecasterState(2, 16, 0).noise_cap(), 4u);
  EXPECT_EQ(ForecasterState(2, 2500, 0).noise_cap(), 50u);
  EXPECT_EQ(ForecasterState(2, 99, 0).noise_cap(), 9u);
}

TEST(Ftpl, StepStaysOnSimplex) {
  ForecasterState state(5, 100, 12);
  for (int t = 0; t < 100; ++t) {
    const auto p = forecast_ftpl_step(state);
    double total = 0.0;
    for (double v : p) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    state.observe(t % 5);
  }
}

TEST(Parse, ForecasterNames) {
  EXPECT_EQ(parse_forecaster("hedge").kind, ForecasterKind::kHedge);
  EXPECT_EQ(parse_forecaster("ftpl", 3).kind, ForecasterKind::kFtpl);
  EXPECT_EQ(parse_forecaster("empirical").kind, ForecasterKind::kEmpirical);
  const auto c = parse_forecaster("constant=0.25");
  EXPECT_EQ(c.kind, ForecasterKind::kConstant);
  EXPECT_DOUBLE_EQ(*c.constant, 0.25);
  EXPECT_EQ(c.id(), "constant=0.25");
  EXPECT_FALSE(parse_forecaster("constant").constant);
  EXPECT_THROW(parse_forecaster("oracle"), ValidationError);
  EXPECT_THROW(parse_forecaster("constant=abc"), ValidationError);
  EXPECT_THROW(parse_forecaster("constant=1.5"), ValidationError);
  EXPECT_THROW(parse_forecaster("hedge", 3), ValidationError);
}

TEST(Patterns, Shapes) {
  EXPECT_EQ(oblivious_pattern("half_ones", 4, 2), (std::vector<int>{1, 1, 0, 0}));
  EXPECT_EQ(oblivious_pattern("alternating", 4, 2), (std::vector<int>{1, 0, 1, 0}));
  EXPECT_EQ(oblivious_pattern("all_ones", 3, 2), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(oblivious_pattern("all_zeros", 2, 2), (std::vector<int>{0, 0}));
  EXPECT_EQ(oblivious_pattern("cyclic", 5, 3), (std::vector<int>{0, 1, 2, 0, 1}));
  EXPECT_EQ(oblivious_pattern("blocks:2", 6, 2), (std::vector<int>{0, 0, 1, 1, 0, 0}));
  EXPECT_EQ(oblivious_pattern("bernoulli:0.3", 50, 2, 4), oblivious_pattern("bernoulli:0.3", 50, 2, 4));
  EXPECT_THROW(oblivious_pattern("zigzag", 4, 2), ValidationError);
  EXPECT_FALSE(pattern_names().empty());
}

TEST(Run, HedgeIsReproducible) {
  const auto xs = oblivious_pattern("alternating", 8, 2);
  const auto spec = parse_forecaster("hedge");
  const auto a = run_forecaster(spec, xs, 8, 42);
  const auto b = run_forecaster(spec, xs, 8, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, run_forecaster(spec, xs, 8, 43));
}

TEST(Run, ConstantBaseRateIsCalibrated) {
  const auto xs = oblivious_pattern("bernoulli:0.3", 200, 2, 1);
  const auto t = run_forecaster(parse_forecaster("constant"), xs, 200, 0);
  EXPECT_NEAR(cal_l1(t), 0.0, 1e-9);
}

TEST(Run, ConstantHalfOnAlternatingIsCalibrated) {
  const auto xs = oblivious_pattern("alternating", 100, 2);
  EXPECT_EQ(cal_l1(run_forecaster(parse_forecaster("constant=0.5"), xs, 100, 0)), 0.0);
}

TEST(Run, EmpiricalAverageFollowsHistory) {
  const std::size_t n = 1000;
  const auto xs = oblivious_pattern("half_ones", n, 2);
  const auto t = run_forecaster(parse_forecaster("empirical"), xs, n, 0);
  EXPECT_EQ(t.binary_prediction(0), 0.5);
  for (std::size_t i = 1; i <= n / 2; ++i) EXPECT_EQ(t.binary_prediction(i), 1.0);
  // Round t (1-based) after the switch predicts (T/2) / (t - 1); the
  // non-causal halves example predicts (T/2) / t.
  const auto ex3 = fixtures::gen_halves_example(fixtures::HalvesExample::kEx3, n);
  for (std::size_t i = n / 2 + 1; i < n; ++i) {
    EXPECT_NEAR(t.binary_prediction(i), 500.0 / static_cast<double>(i), 1e-15);
    EXPECT_EQ(t.binary_prediction(i), ex3.binary_prediction(i - 1));
  }
  EXPECT_NEAR(cal_l1(t) / n, cal_l1(ex3) / n, 2e-3);
}

TEST(Run, RejectsMismatchedOutcomes) {
  const std::vector<int> xs{0, 1};
  EXPECT_THROW(run_forecaster(parse_forecaster("hedge"), xs, 3, 0), ValidationError);
  const std::vector<int> bad{0, 2};
  EXPECT_THROW(run_forecaster(parse_forecaster("hedge"), bad, 2, 0), ValidationError);
}

TEST(Adaptive, ThresholdAdversaryBeatsEmpiricalAverage) {
  ThresholdAdversary adversary(0.5);
  const auto t = run_adaptive_demo(parse_forecaster("empirical"), adversary, 2000, 0);
  EXPECT_GT(vcal(t).value, 0.2 * 2000);
}

}  // namespace
}  // namespace ucal
