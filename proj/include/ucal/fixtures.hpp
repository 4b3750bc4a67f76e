#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucal/scoring.hpp"
#include "ucal/transcript.hpp"
#include "ucal/utility.hpp"

namespace ucal::fixtures {

// u(a, x) = (-1)^a (0.1 - x): bet on 0 or bet on 1 at 9-to-1 odds.
UtilityMatrix wager_agent();

struct LowBrierFixture {
  Transcript transcript;
  UtilityMatrix agent;
};

// T/2 ones then T/2 zeros, predicted with extreme values. The default variant
// misses 20% of each half (T divisible by 20); the quarter-miss variant
// misses 25% (T divisible by 40).
LowBrierFixture gen_low_brier(std::size_t rounds, bool quarter_miss_variant = false);

struct ScoringRuleCounterexample {
  Transcript transcript;
  PLScoringRule modified;
  double miss_fraction = 0.0;
  std::size_t misses_per_half = 0;
  // Set when epsilon is at least the concavity gap l(1/2) - (l(0) + l(1))/2,
  // so the modified rule has no positive regret.
  std::optional<std::string> warning;
};

// Balanced extreme predictions whose miss fraction f makes the forecaster tie
// the base rate under `rule`, and the rule min(l, chord + epsilon) under which
// the same predictions have linear regret. T even.
ScoringRuleCounterexample gen_sr_counterexample(const PLScoringRule& rule, double epsilon, std::size_t rounds);

// All-1/2 predictions on T/2 ones then T/2 zeros; unless `base_variant`, each
// prediction moves toward its outcome by z_t = 0.001 t / T.
Transcript gen_perturbed_calibrated(std::size_t rounds, bool base_variant = false);

enum class HalvesExample { kEx1, kEx2, kEx3 };
// ex1: per-outcome Bernoulli(1/4) / Bernoulli(3/4) prediction counts (T
// divisible by 8); ex2: p_t = x_t; ex3: p_t = 1 then (T/2)/t. All on T/2 ones
// followed by T/2 zeros.
Transcript gen_halves_example(HalvesExample which, std::size_t rounds);
HalvesExample parse_halves_example(std::string_view name);

struct EpochFixture {
  Transcript transcript;
  // Epoch utilities H and L; the raw matrix leaves [-1, 1].
  UtilityMatrix raw_agent;
  UtilityMatrix normalized_agent;  // raw / 6
  std::vector<Transcript> one_vs_all;
};

// Nine epochs of T/9 rounds over K = 3 (T divisible by 9).
EpochFixture gen_multiclass_epoch_example(std::size_t rounds);

// Named fixtures with recomputable expectations, used by the example command.
enum class Relation { kEqual, kAtLeast, kAtMost };
std::string_view to_string(Relation relation);

struct Expectation {
  std::string metric;
  Relation relation = Relation::kEqual;
  double value = 0.0;
  double tolerance = 1e-9;
  std::string note;
};

struct ExpectationOutcome {
  Expectation expectation;
  double actual = 0.0;
  bool passed = false;
};

struct Fixture {
  std::string name;
  std::size_t rounds = 0;
  Transcript transcript;
  std::optional<UtilityMatrix> agent;
  std::optional<UtilityMatrix> normalized_agent;
  std::vector<Expectation> expectations;
};

std::vector<std::string> fixture_names();
Fixture make_fixture(std::string_view name, std::size_t rounds);
std::vector<ExpectationOutcome> check_fixture(const Fixture& fixture);

}  // namespace ucal::fixtures
