#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "ucal/scoring.hpp"
#include "ucal/transcript.hpp"
#include "ucal/utility.hpp"

namespace ucal {

// Sum_t l(p_t, x_t) - sum_t l(beta, x_t).
double reg(const BivariateRule& rule, const Transcript& transcript);

// Binary: sum over distinct p of |p n_p - m_p|.
double cal_l1(const Transcript& transcript, const GroupingOptions& options = {});
// Sum over distinct p of ||sum_{t: p_t = p} (p - e_{x_t})||_1.
double cal_l1_multiclass(const Transcript& transcript, const GroupingOptions& options = {});
// Sum over distinct p of n_p (p - m_p / n_p)^2.
double cal_l2(const Transcript& transcript, const GroupingOptions& options = {});

// Utility of the base-rate best response minus utility of the best responses
// to the forecasts.
double agent_reg(const UtilityMatrix& u, const Transcript& transcript);
// Gain of the best swap function applied to the forecast best responses.
double agent_swap_reg(const UtilityMatrix& u, const Transcript& transcript);

// Closed-form V-shaped regret from sorted per-outcome prediction arrays.
class VRegEvaluator {
 public:
  explicit VRegEvaluator(const Transcript& transcript);

  double operator()(double v) const;
  double base_rate() const { return beta_; }
  std::size_t rounds() const { return zeros_.size() + ones_.size(); }

  // Counts of rounds with outcome x and prediction below / equal to / above v.
  struct Counts {
    double n0_below = 0, n0_equal = 0, n0_above = 0;
    double n1_below = 0, n1_equal = 0, n1_above = 0;
  };
  Counts counts(double v) const;
  // VReg at v for the given counts, using the formula for v < beta (below =
  // true) or v > beta.
  static double formula(double v, const Counts& c, bool below_base_rate);

 private:
  std::vector<double> zeros_;
  std::vector<double> ones_;
  double beta_ = 0.0;
};

double vreg(double v, const Transcript& transcript);

enum class ApproachSide { kExact, kFromAbove, kFromBelow };
std::string_view to_string(ApproachSide side);

struct VCalResult {
  double value = 0.0;
  double witness = 0.0;
  ApproachSide side = ApproachSide::kExact;
};

// Supremum of VReg over [0, 1]: exact values at 0, 1, beta and the distinct
// predictions, plus one-sided limits at both ends of every interval between
// them. Ties keep the leftmost candidate.
VCalResult vcal(const Transcript& transcript);

// (1/T) sum_t w(p_t)(x_t - p_t).
double weak_cal_witness(const Transcript& transcript, const std::function<double(double)>& w);
double spike_witness(double p);

}  // namespace ucal
