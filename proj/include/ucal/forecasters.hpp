#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucal/rng.hpp"
#include "ucal/transcript.hpp"

namespace ucal {

// Logistic S(x) = e^x / (e^x + e^-x).
double logistic(double x);
double logistic_inverse(double u);

class ForecasterState {
 public:
  ForecasterState(int num_outcomes, std::size_t horizon, std::uint64_t seed);

  int num_outcomes() const { return num_outcomes_; }
  std::size_t horizon() const { return horizon_; }
  // Rounds observed so far; the next prediction is for round observed() + 1.
  std::size_t observed() const { return observed_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  // Historical average of binary outcomes (0 before any observation).
  double mean() const;

  double eta() const { return eta_; }
  void set_eta(double eta);
  std::uint64_t noise_cap() const { return noise_cap_; }
  CounterRng& rng() { return rng_; }

  void observe(int outcome);

 private:
  int num_outcomes_;
  std::size_t horizon_;
  std::size_t observed_ = 0;
  std::vector<std::size_t> counts_;
  double eta_;
  std::uint64_t noise_cap_;
  CounterRng rng_;
};

// Prediction CDF of round t >= 2: F(v) = S(scale * (v - mean)) on [0, 1)
// with scale = eta (t - 1), and F(v) = 1 for v >= 1.
double hedge_cdf(double v, double mean, double scale);
// Inverse-CDF draw for a uniform u in (0, 1), with atoms at 0 and 1.
double hedge_sample(double u, double mean, double scale);
// Round 1 predicts 1/2; later rounds sample from hedge_cdf. Binary only.
double forecast_hedge_step(ForecasterState& state);

// Normalized perturbed counts; uniform if every entry is zero.
std::vector<double> ftpl_prediction(std::span<const std::size_t> counts, std::span<const std::uint64_t> noise);
std::vector<double> forecast_ftpl_step(ForecasterState& state);

enum class ForecasterKind { kHedge, kFtpl, kEmpirical, kConstant };

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::kHedge;
  int num_outcomes = 2;
  std::optional<double> eta;
  // Constant forecaster's probability of outcome 1; unset means the base rate
  // of the outcome sequence.
  std::optional<double> constant;

  std::string id() const;
};

// Accepts hedge, ftpl, empirical, constant and constant=<v>.
ForecasterSpec parse_forecaster(std::string_view text, int num_outcomes = 2);

// Outcome sequence fixed before the first round.
std::vector<int> oblivious_pattern(std::string_view pattern, std::size_t rounds, int num_outcomes,
                                   std::uint64_t seed = 0);
// Pattern names accepted by oblivious_pattern.
std::vector<std::string> pattern_names();

Transcript run_forecaster(const ForecasterSpec& spec, std::span<const int> outcomes, std::size_t rounds,
                          std::uint64_t seed);

// Adaptive adversaries see the current prediction before choosing an outcome.
// Kept apart from run_forecaster: guarantees for the forecasters here assume
// an oblivious adversary.
class AdaptiveAdversary {
 public:
  virtual ~AdaptiveAdversary() = default;
  virtual int respond(double prediction) = 0;
};

// x_t = 0 when p_t >= threshold, else 1.
class ThresholdAdversary : public AdaptiveAdversary {
 public:
  explicit ThresholdAdversary(double threshold = 0.5) : threshold_(threshold) {}
  int respond(double prediction) override { return prediction >= threshold_ ? 0 : 1; }

 private:
  double threshold_;
};

Transcript run_adaptive_demo(const ForecasterSpec& spec, AdaptiveAdversary& adversary, std::size_t rounds,
                             std::uint64_t seed);

}  // namespace ucal
