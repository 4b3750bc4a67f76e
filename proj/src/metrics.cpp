#include "ucal/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ucal/agents.hpp"
#include "ucal/error.hpp"
#include "ucal/summation.hpp"

namespace ucal {

namespace {

void require_same_arity(int rule_k, const Transcript& transcript, const char* what) {
  if (rule_k != transcript.num_outcomes()) {
    throw ValidationError(
        fmt::format("{} has arity {} but the transcript has K = {}", what, rule_k, transcript.num_outcomes()));
  }
}

}  // namespace

double reg(const BivariateRule& rule, const Transcript& transcript) {
  require_same_arity(rule.num_outcomes(), transcript, "scoring rule");
  const auto beta = transcript.base_rate();
  const auto counts = transcript.outcome_counts();
  CompensatedSum total;
  for (std::size_t t = 0; t < transcript.size(); ++t) total += rule(transcript.prediction(t), transcript.outcome(t));
  for (std::size_t x = 0; x < counts.size(); ++x) {
    if (counts[x] > 0) total += -static_cast<double>(counts[x]) * rule(beta, static_cast<int>(x));
  }
  return total.value();
}

double cal_l1(const Transcript& transcript, const GroupingOptions& options) {
  require_binary(transcript, "cal_l1");
  CompensatedSum total;
  for (const auto& g : group_by_prediction(transcript, options)) {
    total += std::abs(g.point[1] * static_cast<double>(g.rounds) - static_cast<double>(g.outcome_counts[1]));
  }
  return total.value();
}

double cal_l1_multiclass(const Transcript& transcript, const GroupingOptions& options) {
  CompensatedSum total;
  for (const auto& g : group_by_prediction(transcript, options)) {
    for (std::size_t i = 0; i < g.point.size(); ++i) {
      total += std::abs(g.point[i] * static_cast<double>(g.rounds) - static_cast<double>(g.outcome_counts[i]));
    }
  }
  return total.value();
}

double cal_l2(const Transcript& transcript, const GroupingOptions& options) {
  require_binary(transcript, "cal_l2");
  CompensatedSum total;
  for (const auto& g : group_by_prediction(transcript, options)) {
    const double n = static_cast<double>(g.rounds);
    const double gap = g.point[1] - static_cast<double>(g.outcome_counts[1]) / n;
    total += n * gap * gap;
  }
  return total.value();
}

double agent_reg(const UtilityMatrix& u, const Transcript& transcript) {
  require_same_arity(u.num_outcomes(), transcript, "agent");
  const int base_action = best_response(u, transcript.base_rate());
  CompensatedSum total;
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    const int x = transcript.outcome(t);
    total += u(base_action, x);
    total += -u(best_response(u, transcript.prediction(t)), x);
  }
  return total.value();
}

double agent_swap_reg(const UtilityMatrix& u, const Transcript& transcript) {
  require_same_arity(u.num_outcomes(), transcript, "agent");
  const SwapFunction pi = best_swap(u, transcript);
  CompensatedSum total;
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    const int x = transcript.outcome(t);
    const int a = best_response(u, transcript.prediction(t));
    total += u(pi[static_cast<std::size_t>(a)], x);
    total += -u(a, x);
  }
  return total.value();
}

VRegEvaluator::VRegEvaluator(const Transcript& transcript) {
  require_binary(transcript, "vreg");
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    (transcript.outcome(t) == 1 ? ones_ : zeros_).push_back(transcript.binary_prediction(t));
  }
  std::sort(zeros_.begin(), zeros_.end());
  std::sort(ones_.begin(), ones_.end());
  beta_ = transcript.binary_base_rate();
}

VRegEvaluator::Counts VRegEvaluator::counts(double v) const {
  auto split = [v](const std::vector<double>& xs, double& below, double& equal, double& above) {
    const auto lo = std::lower_bound(xs.begin(), xs.end(), v);
    const auto hi = std::upper_bound(lo, xs.end(), v);
    below = static_cast<double>(lo - xs.begin());
    equal = static_cast<double>(hi - lo);
    above = static_cast<double>(xs.end() - hi);
  };
  Counts c;
  split(zeros_, c.n0_below, c.n0_equal, c.n0_above);
  split(ones_, c.n1_below, c.n1_equal, c.n1_above);
  return c;
}

double VRegEvaluator::formula(double v, const Counts& c, bool below_base_rate) {
  if (below_base_rate) {
    return 2.0 * (1.0 - v) * c.n1_below - 2.0 * v * c.n0_below + (1.0 - v) * c.n1_equal - v * c.n0_equal;
  }
  return 2.0 * v * c.n0_above - 2.0 * (1.0 - v) * c.n1_above + v * c.n0_equal - (1.0 - v) * c.n1_equal;
}

double VRegEvaluator::operator()(double v) const {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("V-shape center {} outside [0, 1]", v));
  const Counts c = counts(v);
  if (v < beta_) return formula(v, c, true);
  if (v > beta_) return formula(v, c, false);
  // At v = beta the benchmark scores vanish.
  return v * (c.n0_above - c.n0_below) + (1.0 - v) * (c.n1_below - c.n1_above);
}

double vreg(double v, const Transcript& transcript) { return VRegEvaluator(transcript)(v); }

std::string_view to_string(ApproachSide side) {
  switch (side) {
    case ApproachSide::kExact:
      return "exact";
    case ApproachSide::kFromAbove:
      return "above";
    case ApproachSide::kFromBelow:
      return "below";
  }
  return "exact";
}

VCalResult vcal(const Transcript& transcript) {
  const VRegEvaluator eval(transcript);
  std::vector<double> splits{0.0, 1.0, eval.base_rate()};
  for (std::size_t t = 0; t < transcript.size(); ++t) splits.push_back(transcript.binary_prediction(t));
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

  VCalResult best{eval(splits.front()), splits.front(), ApproachSide::kExact};
  auto offer = [&best](double value, double v, ApproachSide side) {
    if (value > best.value) best = {value, v, side};
  };
  for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
    const double a = splits[i];
    const double b = splits[i + 1];
    // Interior counts: nothing is predicted strictly between a and b.
    VRegEvaluator::Counts inside = eval.counts(a);
    inside.n0_below += inside.n0_equal;
    inside.n1_below += inside.n1_equal;
    inside.n0_equal = inside.n1_equal = 0.0;
    const bool below = b <= eval.base_rate();
    offer(VRegEvaluator::formula(a, inside, below), a, ApproachSide::kFromAbove);
    offer(VRegEvaluator::formula(b, inside, below), b, ApproachSide::kFromBelow);
    offer(eval(b), b, ApproachSide::kExact);
  }
  return best;
}

double weak_cal_witness(const Transcript& transcript, const std::function<double(double)>& w) {
  require_binary(transcript, "weak_cal_witness");
  CompensatedSum total;
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    const double p = transcript.binary_prediction(t);
    total += w(p) * (static_cast<double>(transcript.outcome(t)) - p);
  }
  return total.value() / static_cast<double>(transcript.size());
}

double spike_witness(double p) { return std::max(0.1 - std::abs(0.75 - p), 0.0); }

}  // namespace ucal
