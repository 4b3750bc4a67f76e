#include "ucal/fixtures.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ucal/error.hpp"
#include "ucal/metrics.hpp"
#include "ucal/summation.hpp"

namespace ucal::fixtures {

namespace {

void require_divisible(std::size_t rounds, std::size_t by, std::string_view what) {
  if (rounds == 0 || rounds % by != 0) {
    throw ValidationError(fmt::format("{} needs T divisible by {}, got {}", what, by, rounds));
  }
}

// T/2 ones then T/2 zeros; in each half the first `correct` rounds predict the
// outcome and the rest predict its complement.
Transcript extreme_halves(std::size_t rounds, std::size_t correct_per_half) {
  const std::size_t half = rounds / 2;
  std::vector<int> xs(rounds);
  std::vector<double> ps(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    const int x = t < half ? 1 : 0;
    const bool correct = (t % half) < correct_per_half;
    xs[t] = x;
    ps[t] = correct ? x : 1 - x;
  }
  return Transcript::binary(std::move(xs), ps);
}

std::vector<int> half_ones(std::size_t rounds) {
  std::vector<int> xs(rounds, 0);
  for (std::size_t t = 0; t < rounds / 2; ++t) xs[t] = 1;
  return xs;
}

double harmonic_tail(std::size_t rounds) {
  // (T/2) * sum_{t = T/2 + 1}^{T} 1/t, summed from the small terms up.
  CompensatedSum s;
  for (std::size_t t = rounds; t > rounds / 2; --t) s += 1.0 / static_cast<double>(t);
  return static_cast<double>(rounds / 2) * s.value();
}

}  // namespace

UtilityMatrix wager_agent() { return UtilityMatrix({{0.1, -0.9}, {-0.1, 0.9}}, {"bet0", "bet1"}); }

LowBrierFixture gen_low_brier(std::size_t rounds, bool quarter_miss_variant) {
  if (quarter_miss_variant) {
    require_divisible(rounds, 40, "gen_low_brier quarter-miss variant");
    return {extreme_halves(rounds, rounds / 2 * 3 / 4), wager_agent()};
  }
  require_divisible(rounds, 20, "gen_low_brier");
  return {extreme_halves(rounds, rounds / 2 * 4 / 5), wager_agent()};
}

ScoringRuleCounterexample gen_sr_counterexample(const PLScoringRule& rule, double epsilon, std::size_t rounds) {
  require_divisible(rounds, 2, "gen_sr_counterexample");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const double l0 = rule(0.0);
  const double l1 = rule(1.0);
  const double slope_gap = rule.right_slope(0.0) - rule.left_slope(1.0);
  if (!(slope_gap > 0.0)) {
    throw ValidationError("rule is linear: every forecaster has zero regret, no miss fraction exists");
  }
  const double gap = rule(0.5) - 0.5 * (l0 + l1);
  ScoringRuleCounterexample out{Transcript::binary({0}, {0.0}), rule, 0.0, 0, std::nullopt};
  out.miss_fraction = gap / (0.5 * slope_gap);
  const std::size_t half = rounds / 2;
  out.misses_per_half = static_cast<std::size_t>(std::llround(out.miss_fraction * static_cast<double>(half)));
  out.transcript = extreme_halves(rounds, half - out.misses_per_half);

  std::vector<double> slopes;
  std::vector<double> intercepts;
  for (std::size_t i = 0; i < rule.slopes().size(); ++i) {
    slopes.push_back(rule.slopes()[i]);
    intercepts.push_back(rule.intercept(i));
  }
  slopes.push_back(l1 - l0);
  intercepts.push_back(l0 + epsilon);
  out.modified = PLScoringRule::min_of_lines(slopes, intercepts);
  if (epsilon >= gap) {
    out.warning = fmt::format("epsilon {} is not below the concavity gap {}; the modified rule gains nothing",
                              epsilon, gap);
  }
  return out;
}

Transcript gen_perturbed_calibrated(std::size_t rounds, bool base_variant) {
  require_divisible(rounds, 2, "gen_perturbed_calibrated");
  auto xs = half_ones(rounds);
  std::vector<double> ps(rounds, 0.5);
  if (!base_variant) {
    for (std::size_t t = 0; t < rounds; ++t) {
      const double z = 0.001 * static_cast<double>(t + 1) / static_cast<double>(rounds);
      ps[t] = xs[t] == 1 ? 0.5 + z : 0.5 - z;
    }
  }
  return Transcript::binary(std::move(xs), ps);
}

Transcript gen_halves_example(HalvesExample which, std::size_t rounds) {
  switch (which) {
    case HalvesExample::kEx1: {
      require_divisible(rounds, 8, "halves example 1");
      return extreme_halves(rounds, rounds / 2 * 3 / 4);
    }
    case HalvesExample::kEx2:
      require_divisible(rounds, 2, "halves example 2");
      return extreme_halves(rounds, rounds / 2);
    case HalvesExample::kEx3: {
      require_divisible(rounds, 2, "halves example 3");
      const double half = static_cast<double>(rounds / 2);
      std::vector<double> ps(rounds);
      for (std::size_t t = 1; t <= rounds; ++t) ps[t - 1] = t <= rounds / 2 ? 1.0 : half / static_cast<double>(t);
      return Transcript::binary(half_ones(rounds), ps);
    }
  }
  throw ValidationError("unknown halves example");
}

HalvesExample parse_halves_example(std::string_view name) {
  if (name == "ex1") return HalvesExample::kEx1;
  if (name == "ex2") return HalvesExample::kEx2;
  if (name == "ex3") return HalvesExample::kEx3;
  throw ValidationError(fmt::format("unknown example '{}', expected ex1, ex2 or ex3", name));
}

EpochFixture gen_multiclass_epoch_example(std::size_t rounds) {
  require_divisible(rounds, 9, "multiclass epoch example");
  constexpr double a = 1.0 / 3.0;
  constexpr double b = 2.0 / 3.0;
  const std::vector<std::pair<int, std::vector<double>>> epochs = {
      {0, {b, 0, a}}, {0, {b, 0, a}}, {0, {a, 0, b}},  //
      {1, {a, b, 0}}, {1, {a, b, 0}}, {1, {b, a, 0}},  //
      {2, {0, a, b}}, {2, {0, a, b}}, {2, {0, b, a}},
  };
  const std::size_t len = rounds / 9;
  std::vector<int> xs;
  std::vector<std::vector<double>> ps;
  for (const auto& [x, p] : epochs) {
    for (std::size_t i = 0; i < len; ++i) {
      xs.push_back(x);
      ps.push_back(p);
    }
  }
  Transcript transcript = Transcript::multiclass(3, std::move(xs), ps);
  std::vector<std::vector<double>> table = {{3, 6, 5}, {5, 3, 0}};
  UtilityMatrix raw = UtilityMatrix::unbounded(table, {"H", "L"});
  for (auto& row : table) {
    for (double& v : row) v /= 6.0;
  }
  UtilityMatrix normalized(table, {"H", "L"});
  std::vector<Transcript> reductions;
  for (int i = 0; i < 3; ++i) reductions.push_back(transcript.one_vs_all(i));
  return {std::move(transcript), std::move(raw), std::move(normalized), std::move(reductions)};
}

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::kEqual:
      return "eq";
    case Relation::kAtLeast:
      return "ge";
    case Relation::kAtMost:
      return "le";
  }
  return "eq";
}

std::vector<std::string> fixture_names() {
  return {"low_brier", "low_brier_quarter", "ex1", "ex2", "ex3", "perturbed", "perturbed_base", "epoch"};
}

Fixture make_fixture(std::string_view name, std::size_t rounds) {
  const double t = static_cast<double>(rounds);
  Fixture f{std::string(name), rounds, Transcript::binary({0}, {0.0}), std::nullopt, std::nullopt, {}};
  using R = Relation;
  if (name == "low_brier" || name == "low_brier_quarter") {
    const bool quarter = name == "low_brier_quarter";
    auto g = gen_low_brier(rounds, quarter);
    f.transcript = std::move(g.transcript);
    f.agent = std::move(g.agent);
    if (quarter) {
      f.expectations = {{"vcal", R::kEqual, 0.25 * t, 1e-9, ""}};
    } else {
      f.expectations = {{"brier_total", R::kEqual, 0.2 * t, 1e-9, ""},
                        {"reg_brier", R::kEqual, -0.05 * t, 1e-9, ""},
                        {"agent_reg", R::kEqual, 0.1 * t, 1e-9, "9-to-1 wager agent"}};
    }
  } else if (name == "ex1") {
    f.transcript = gen_halves_example(HalvesExample::kEx1, rounds);
    f.expectations = {{"vcal", R::kEqual, 0.25 * t, 1e-9, ""}, {"vreg_0.4", R::kEqual, -0.15 * t, 1e-9, ""}};
  } else if (name == "ex2") {
    f.transcript = gen_halves_example(HalvesExample::kEx2, rounds);
    f.expectations = {{"vcal", R::kEqual, 0.0, 1e-9, ""}, {"cal", R::kEqual, 0.0, 1e-9, ""}};
  } else if (name == "ex3") {
    f.transcript = gen_halves_example(HalvesExample::kEx3, rounds);
    f.expectations = {
        {"abs_vcal_over_t", R::kAtMost, 0.02, 0.0, "asymptotic bound, threshold set at T = 100000"},
        {"cal", R::kEqual, harmonic_tail(rounds), 1e-9 * t, "(T/2)(H_T - H_{T/2}), about 0.3466 T"},
        {"spike_witness_abs", R::kAtLeast, 0.005, 0.0, "threshold set at T = 100000"},
    };
  } else if (name == "perturbed" || name == "perturbed_base") {
    const bool base = name == "perturbed_base";
    f.transcript = gen_perturbed_calibrated(rounds, base);
    if (base) {
      f.expectations = {{"cal", R::kEqual, 0.0, 1e-9, ""}};
    } else {
      f.expectations = {{"cal", R::kAtLeast, 0.499 * t, 0.0, ""},
                        {"reg_brier", R::kAtMost, 0.0, 1e-9, ""},
                        {"vcal", R::kAtMost, 0.0, 1e-9, ""}};
    }
  } else if (name == "epoch") {
    auto g = gen_multiclass_epoch_example(rounds);
    f.transcript = std::move(g.transcript);
    f.agent = std::move(g.raw_agent);
    f.normalized_agent = std::move(g.normalized_agent);
    f.expectations = {{"cal_outcome_0", R::kEqual, 0.0, 1e-9, ""},
                      {"cal_outcome_1", R::kEqual, 0.0, 1e-9, ""},
                      {"cal_outcome_2", R::kEqual, 0.0, 1e-9, ""},
                      {"agent_reg", R::kEqual, t / 3.0, 1e-9, "raw epoch utility"},
                      {"agent_reg_normalized", R::kEqual, t / 18.0, 1e-9, "utility divided by 6"}};
  } else {
    throw ValidationError(fmt::format("unknown fixture '{}'", name));
  }
  return f;
}

namespace {

double fixture_metric(const Fixture& f, std::string_view metric) {
  const Transcript& tr = f.transcript;
  const double t = static_cast<double>(tr.size());
  if (metric == "reg_brier") return reg(BivariateRule::brier(tr.num_outcomes()), tr);
  if (metric == "brier_total") {
    const auto brier = BivariateRule::brier(tr.num_outcomes());
    CompensatedSum s;
    for (std::size_t i = 0; i < tr.size(); ++i) s += brier(tr.prediction(i), tr.outcome(i));
    return s.value();
  }
  if (metric == "agent_reg") return agent_reg(f.agent.value(), tr);
  if (metric == "agent_reg_normalized") return agent_reg(f.normalized_agent.value(), tr);
  if (metric == "vcal") return vcal(tr).value;
  if (metric == "abs_vcal_over_t") return std::abs(vcal(tr).value) / t;
  if (metric == "vreg_0.4") return vreg(0.4, tr);
  if (metric == "cal") return cal_l1(tr);
  if (metric == "spike_witness_abs") return std::abs(weak_cal_witness(tr, spike_witness));
  if (metric.starts_with("cal_outcome_")) {
    return cal_l1(tr.one_vs_all(std::stoi(std::string(metric.substr(12)))));
  }
  throw ValidationError(fmt::format("unknown fixture metric '{}'", metric));
}

}  // namespace

std::vector<ExpectationOutcome> check_fixture(const Fixture& fixture) {
  std::vector<ExpectationOutcome> out;
  for (const auto& e : fixture.expectations) {
    const double actual = fixture_metric(fixture, e.metric);
    bool ok = false;
    switch (e.relation) {
      case Relation::kEqual:
        ok = std::abs(actual - e.value) <= e.tolerance;
        break;
      case Relation::kAtLeast:
        ok = actual >= e.value - e.tolerance;
        break;
      case Relation::kAtMost:
        ok = actual <= e.value + e.tolerance;
        break;
    }
    out.push_back({e, actual, ok});
  }
  return out;
}

}  // namespace ucal::fixtures
