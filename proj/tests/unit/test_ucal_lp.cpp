#include <gtest/gtest.h>

#include <numeric>

#include "support/random.hpp"
#include "ucal/agents.hpp"
#include "ucal/error.hpp"
#include "ucal/fixtures.hpp"
#include "ucal/metrics.hpp"
#include "ucal/oracle.hpp"
#include "ucal/ucal_lp.hpp"

namespace ucal {
namespace {

using fixtures::HalvesExample;

TEST(UcalInstance, AnchorsAndCounts) {
  const auto t = Transcript::binary({1, 0, 1, 1}, {0.7, 0.2, 0.7, 0.2});
  const auto inst = build_ucal_instance(t);
  ASSERT_EQ(inst.skeleton.anchors.size(), 3u);
  EXPECT_FALSE(inst.skeleton.base_merged);
  EXPECT_EQ(inst.skeleton.base_anchor, 2u);
  EXPECT_DOUBLE_EQ(inst.skeleton.anchors[0][1], 0.7);
  EXPECT_DOUBLE_EQ(inst.skeleton.anchors[1][1], 0.2);
  EXPECT_DOUBLE_EQ(inst.skeleton.anchors[2][1], 0.75);
  EXPECT_EQ(inst.counts[0], (std::vector<double>{0, 2}));
  EXPECT_EQ(inst.counts[1], (std::vector<double>{1, 1}));
  EXPECT_DOUBLE_EQ(inst.coefficient(2, 1), -3.0);
}

TEST(UcalInstance, BaseRateMergesWithPrediction) {
  const auto t = Transcript::binary({1, 0}, {0.5, 0.5});
  const auto inst = build_ucal_instance(t);
  EXPECT_TRUE(inst.skeleton.base_merged);
  EXPECT_EQ(inst.skeleton.anchors.size(), 1u);
  EXPECT_DOUBLE_EQ(inst.coefficient(0, 0), 0.0);
}

TEST(MaxAgentReg, BaseRatePredictionsGiveZero) {
  const auto t = Transcript::binary({1, 0, 0, 1}, std::vector<double>(4, 0.5));
  const auto sol = max_agent_reg(t);
  ASSERT_EQ(sol.status, SimplexStatus::kOptimal);
  EXPECT_NEAR(sol.value, 0.0, 1e-12);
}

TEST(MaxAgentReg, WagerRuleIsFeasibleOnLowBrier) {
  const auto f = fixtures::gen_low_brier(100);
  const auto inst = build_ucal_instance(f.transcript);
  const auto table = table_from_rule(inst, agent_to_rule(f.agent));
  EXPECT_FALSE(membership_check(table));
  EXPECT_NEAR(inst.objective(table), 10.0, 1e-12);
  const auto sol = max_agent_reg(f.transcript);
  ASSERT_EQ(sol.status, SimplexStatus::kOptimal);
  EXPECT_GE(sol.value, 10.0 - 1e-9);
  EXPECT_NEAR(sol.value, oracle::max_agent_reg_vertex(f.transcript), 1e-9);
}

TEST(MaxAgentReg, HalvesExampleOneBracket) {
  const auto t = fixtures::gen_halves_example(HalvesExample::kEx1, 200);
  const auto sol = max_agent_reg(t);
  ASSERT_EQ(sol.status, SimplexStatus::kOptimal);
  EXPECT_GE(sol.value, 50.0 - 1e-9);
  EXPECT_LE(sol.value, 100.0 + 1e-9);
  EXPECT_NEAR(reg(extract_witness(sol), t), sol.value, 1e-9 * 200);
  EXPECT_LE(sol.value, sol.bound + 1e-9);
}

TEST(MaxAgentReg, EpochExampleRegret) {
  const auto f = fixtures::gen_multiclass_epoch_example(90);
  const auto inst = build_ucal_instance(f.transcript);
  // Unscaled epoch agent: T/3 before normalization.
  EXPECT_NEAR(inst.objective(table_from_rule(inst, agent_to_rule(f.raw_agent))), 30.0, 1e-9);
  const auto sol = max_agent_reg(f.transcript);
  ASSERT_EQ(sol.status, SimplexStatus::kOptimal);
  EXPECT_GE(sol.value, 90.0 / 18.0 - 1e-9);
  EXPECT_FALSE(membership_check(sol.table));
  EXPECT_NEAR(reg(extract_witness(sol), f.transcript), sol.value, 1e-9 * 90);
}

TEST(MaxAgentReg, InvariantUnderRoundPermutation) {
  CounterRng rng(71);
  const auto t = testing::random_binary_transcript(rng, 30);
  std::vector<std::size_t> perm(t.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i)]);
  EXPECT_NEAR(max_agent_reg(t).value, max_agent_reg(t.permuted(perm)).value, 1e-9);
}

TEST(MaxAgentReg, AnchorCapIsEnforced) {
  CounterRng rng(1);
  std::vector<double> ps(50);
  for (double& p : ps) p = rng.uniform();
  const auto t = Transcript::binary(std::vector<int>(50, 1), ps);
  MaxAgentRegOptions options;
  options.max_anchors = 10;
  EXPECT_THROW(max_agent_reg(t, options), ValidationError);
  options.max_anchors = 2000;
  options.epsilon = 0.0;
  EXPECT_THROW(max_agent_reg(t, options), ValidationError);
}

TEST(Membership, BrierTableIsFeasible) {
  CounterRng rng(6);
  const auto t = testing::random_binary_transcript(rng, 40);
  const auto inst = build_ucal_instance(t);
  EXPECT_FALSE(membership_check(table_from_rule(inst, BivariateRule::brier())));
}

TEST(Membership, FlippedRowIsReported) {
  const auto t = Transcript::binary({1, 0, 1}, {0.2, 0.6, 0.9});
  const auto inst = build_ucal_instance(t);
  auto table = table_from_rule(inst, BivariateRule::brier());
  for (double& v : table.y[1]) v = -v;
  const auto violation = membership_check(table);
  ASSERT_TRUE(violation);
  EXPECT_GT(violation->margin, 1e-9);
  // Anchor 1 now scores below Brier, so some other anchor prefers reporting it.
  EXPECT_EQ(violation->other, 1u);
  const auto& pa = table.anchors[violation->anchor];
  const auto& ya = table.y[violation->anchor];
  const auto& yb = table.y[violation->other];
  EXPECT_GT(pa[0] * ya[0] + pa[1] * ya[1] - (pa[0] * yb[0] + pa[1] * yb[1]), 1e-9);
}

TEST(Membership, BoxViolationReportsSameAnchor) {
  const auto t = Transcript::binary({1}, {0.2});
  auto table = table_from_rule(build_ucal_instance(t), BivariateRule::brier());
  table.y[0][0] = 1.5;
  const auto violation = membership_check(table);
  ASSERT_TRUE(violation);
  EXPECT_EQ(violation->anchor, violation->other);
}

TEST(Witness, ZeroTableGivesZeroRule) {
  CounterRng rng(2);
  const auto t = testing::random_binary_transcript(rng, 20);
  auto table = build_ucal_instance(t).skeleton;
  const auto rule = extract_witness(table);
  EXPECT_EQ(reg(rule, t), 0.0);
}

TEST(Witness, ReproducesTableAtAnchors) {
  CounterRng rng(3);
  const auto t = testing::random_binary_transcript(rng, 25);
  const auto sol = max_agent_reg(t);
  const auto rule = extract_witness(sol);
  for (std::size_t a = 0; a < sol.table.anchors.size(); ++a) {
    for (int x = 0; x < 2; ++x) {
      EXPECT_EQ(rule(sol.table.anchors[a], x), sol.table.y[a][static_cast<std::size_t>(x)]);
    }
  }
  EXPECT_TRUE(check_properness(rule, binary_grid(51), 1e-9).proper);
}

TEST(DumpLP, DeterministicText) {
  const auto t = Transcript::binary({1, 0}, {0.3, 0.8});
  const auto inst = build_ucal_instance(t);
  const auto text = dump_lp(inst);
  EXPECT_EQ(text, dump_lp(build_ucal_instance(t)));
  EXPECT_NE(text.find("OBJSENSE"), std::string::npos);
}

TEST(TableToAgent, NegatesRows) {
  const auto t = Transcript::binary({1, 0}, {0.3, 0.8});
  const auto table = table_from_rule(build_ucal_instance(t), BivariateRule::brier());
  const auto agent = table_to_agent(table);
  EXPECT_EQ(agent.num_actions(), static_cast<int>(table.anchors.size()));
  EXPECT_EQ(agent(0, 1), -table.y[0][1]);
}

}  // namespace
}  // namespace ucal
