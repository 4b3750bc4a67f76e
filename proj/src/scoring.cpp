#include "ucal/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ucal/agents.hpp"
#include "ucal/error.hpp"
#include "ucal/summation.hpp"

namespace ucal {

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

PLScoringRule::PLScoringRule(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.size() != breakpoints_.size() + 2) {
    throw ValidationError(fmt::format("PL rule with {} breakpoints needs {} values, got {}", breakpoints_.size(),
                                      breakpoints_.size() + 2, values_.size()));
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double b = breakpoints_[i];
    if (!(b > prev && b < 1.0)) {
      throw ValidationError(
          fmt::format("breakpoint {} = {} must be strictly increasing inside (0, 1)", i, b));
    }
    prev = b;
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("PL rule values must be finite");
  }
  knots_.reserve(values_.size());
  knots_.push_back(0.0);
  knots_.insert(knots_.end(), breakpoints_.begin(), breakpoints_.end());
  knots_.push_back(1.0);
  slopes_.resize(knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    slopes_[i] = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
  }
  for (std::size_t i = 0; i + 1 < slopes_.size(); ++i) {
    if (slopes_[i + 1] > slopes_[i] + kConcavityTolerance) {
      throw ValidationError(fmt::format(
          "not concave: segment {} [{}, {}] has slope {} but segment {} [{}, {}] has larger slope {}", i,
          knots_[i], knots_[i + 1], slopes_[i], i + 1, knots_[i + 1], knots_[i + 2], slopes_[i + 1]));
    }
  }
}

PLScoringRule PLScoringRule::min_of_lines(std::span<const double> slopes, std::span<const double> intercepts) {
  if (slopes.empty() || slopes.size() != intercepts.size()) {
    throw ValidationError("min_of_lines needs equally many slopes and intercepts, at least one");
  }
  constexpr double kMinSegment = 1e-12;
  const std::size_t n = slopes.size();
  std::size_t cur = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (intercepts[j] < intercepts[cur] || (intercepts[j] == intercepts[cur] && slopes[j] < slopes[cur])) cur = j;
  }
  std::vector<double> knots{0.0};
  std::vector<double> values{intercepts[cur]};
  double x = 0.0;
  while (true) {
    double best_x = 1.0;
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(slopes[j] < slopes[cur])) continue;
      const double xi = std::max(x, (intercepts[j] - intercepts[cur]) / (slopes[cur] - slopes[j]));
      if (xi < best_x || (xi == best_x && next < n && slopes[j] < slopes[next])) {
        best_x = xi;
        next = j;
      }
    }
    if (next == n) break;
    if (best_x > knots.back() + kMinSegment && best_x < 1.0 - kMinSegment) {
      knots.push_back(best_x);
      values.push_back(slopes[next] * best_x + intercepts[next]);
    }
    cur = next;
    x = best_x;
  }
  values.push_back(slopes[cur] + intercepts[cur]);
  std::vector<double> breakpoints(knots.begin() + 1, knots.end());
  return PLScoringRule(std::move(breakpoints), std::move(values));
}

PLScoringRule PLScoringRule::linear(double at_zero, double at_one) { return PLScoringRule({}, {at_zero, at_one}); }

PLScoringRule PLScoringRule::vshape(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("V-shape center {} outside [0, 1]", v));
  if (v == 0.0) return linear(0.0, -1.0);
  if (v == 1.0) return linear(-1.0, 0.0);
  return PLScoringRule({v}, {-v, 0.0, -(1.0 - v)});
}

PLScoringRule PLScoringRule::brier(int segments) {
  if (segments < 1) throw ValidationError("Brier interpolation needs at least one segment");
  std::vector<double> breakpoints;
  std::vector<double> values{0.0};
  for (int i = 1; i < segments; ++i) {
    const double p = static_cast<double>(i) / segments;
    breakpoints.push_back(p);
    values.push_back(p * (1.0 - p));
  }
  values.push_back(0.0);
  return PLScoringRule(std::move(breakpoints), std::move(values));
}

std::size_t PLScoringRule::segment_of(double p) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), p);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
  return std::min(idx, slopes_.size() - 1);
}

double PLScoringRule::operator()(double p) const {
  const std::size_t i = segment_of(p);
  if (p == knots_[i]) return values_[i];
  if (p == knots_[i + 1]) return values_[i + 1];
  return values_[i] + slopes_[i] * (p - knots_[i]);
}

double PLScoringRule::left_slope(double p) const {
  const std::size_t i = segment_of(p);
  if (p == knots_[i] && i > 0) return slopes_[i - 1];
  return slopes_[i];
}

double PLScoringRule::right_slope(double p) const { return slopes_[segment_of(p)]; }

double PLScoringRule::subgradient(double p) const {
  const std::size_t i = segment_of(p);
  if (p == knots_[i] && i > 0) return 0.5 * (slopes_[i - 1] + slopes_[i]);
  return slopes_[i];
}

double PLScoringRule::score(double p, int outcome) const {
  const std::size_t i = segment_of(p);
  if (p == knots_[i] && i > 0) {
    const double g = 0.5 * (slopes_[i - 1] + slopes_[i]);
    return outcome == 0 ? values_[i] - p * g : values_[i] + (1.0 - p) * g;
  }
  const double c = intercept(i);
  return outcome == 0 ? c : c + slopes_[i];
}

double PLScoringRule::max_abs_score() const {
  double m = 0.0;
  for (std::size_t i = 0; i < slopes_.size(); ++i) {
    const double c = intercept(i);
    m = std::max({m, std::abs(c), std::abs(c + slopes_[i])});
  }
  return m;
}

double PLScoringRule::max_abs_slope() const {
  double m = 0.0;
  for (double s : slopes_) m = std::max(m, std::abs(s));
  return m;
}

bool PLScoringRule::in_bounded_class(double tolerance) const {
  return max_abs_score() <= 1.0 + tolerance && max_abs_slope() <= 2.0 + tolerance;
}

PLScoringRule PLScoringRule::plus_affine(double c0, double c1) const {
  std::vector<double> values(values_.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = values_[i] + c0 + c1 * knots_[i];
  return PLScoringRule(breakpoints_, std::move(values));
}

BivariateRule::BivariateRule(int num_outcomes, std::string name, Evaluator evaluator, double bound)
    : num_outcomes_(num_outcomes), name_(std::move(name)), evaluator_(std::move(evaluator)), bound_(bound) {
  if (num_outcomes_ < 2) throw ValidationError("scoring rule needs K >= 2 outcomes");
  if (!evaluator_) throw ValidationError("scoring rule evaluator is empty");
}

BivariateRule BivariateRule::brier(int num_outcomes) {
  return BivariateRule(num_outcomes, "brier", [](std::span<const double> p, int x) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p[i] - (static_cast<int>(i) == x ? 1.0 : 0.0);
      s += d * d;
    }
    return 0.5 * s;
  });
}

BivariateRule BivariateRule::vshape(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("V-shape center {} outside [0, 1]", v));
  const VShapedRule rule{v};
  return BivariateRule(2, fmt::format("vshape({})", v),
                       [rule](std::span<const double> p, int x) { return rule.score(p[1], x); });
}

BivariateRule BivariateRule::from_pl(const PLScoringRule& rule) {
  return BivariateRule(2, "pl", [rule](std::span<const double> p, int x) { return rule.score(p[1], x); },
                       std::max(1.0, rule.max_abs_score()));
}

BivariateRule BivariateRule::separable(std::vector<PLScoringRule> per_outcome) {
  const int k = static_cast<int>(per_outcome.size());
  if (k < 2) throw ValidationError("separable rule needs one component per outcome, K >= 2");
  double bound = 0.0;
  for (const auto& r : per_outcome) bound = std::max(bound, r.max_abs_score());
  return BivariateRule(
      k, "separable",
      [rules = std::move(per_outcome)](std::span<const double> p, int x) {
        double s = 0.0;
        for (std::size_t i = 0; i < rules.size(); ++i) {
          s += rules[i].score(p[i], static_cast<int>(i) == x ? 1 : 0);
        }
        return s / static_cast<double>(rules.size());
      },
      std::max(1.0, bound));
}

BivariateRule BivariateRule::sum(const BivariateRule& a, const BivariateRule& b) {
  if (a.num_outcomes() != b.num_outcomes()) {
    throw ValidationError(fmt::format("cannot add rules of arity {} and {}", a.num_outcomes(), b.num_outcomes()));
  }
  return BivariateRule(
      a.num_outcomes(), a.name() + "+" + b.name(),
      [a, b](std::span<const double> p, int x) { return a(p, x) + b(p, x); }, a.bound() + b.bound());
}

BivariateRule BivariateRule::renamed(std::string name) const {
  BivariateRule copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

double BivariateRule::binary(double p, int outcome) const {
  const std::array<double, 2> point{1.0 - p, p};
  return evaluator_(point, outcome);
}

double BivariateRule::expected(std::span<const double> p, std::span<const double> q) const {
  double s = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] != 0.0) s += q[x] * evaluator_(p, static_cast<int>(x));
  }
  return s;
}

BivariateRule bivariate_from_univariate(const PLScoringRule& rule) { return BivariateRule::from_pl(rule); }

double VShapedRule::univariate(double p) const { return -std::abs(p - v); }

double VShapedRule::score(double p, int outcome) const {
  if (p == v) return 0.0;
  return outcome == 0 ? v * sgn(p - v) : (1.0 - v) * sgn(v - p);
}

double VDecomposition::weight_sum() const {
  CompensatedSum s;
  for (double w : weights) s += w;
  return s.value();
}

double VDecomposition::univariate(double p) const {
  CompensatedSum s;
  s += c1 * p;
  s += c0;
  for (std::size_t i = 0; i < centers.size(); ++i) s += -weights[i] * std::abs(p - centers[i]);
  return s.value();
}

VDecomposition v_decompose(const PLScoringRule& rule) {
  VDecomposition d;
  const auto& slopes = rule.slopes();
  d.centers = rule.breakpoints();
  d.weights.resize(d.centers.size());
  CompensatedSum lambda_sum;
  CompensatedSum lambda_v;
  for (std::size_t i = 0; i < d.centers.size(); ++i) {
    d.weights[i] = 0.5 * (slopes[i] - slopes[i + 1]);
    lambda_sum += d.weights[i];
    lambda_v += d.weights[i] * d.centers[i];
  }
  d.c0 = rule.values().front() + lambda_v.value();
  d.c1 = slopes.front() - lambda_sum.value();
  return d;
}

double properness_margin(const BivariateRule& rule, std::span<const double> truth, std::span<const double> report) {
  return rule.expected(truth, truth) - rule.expected(report, truth);
}

PropernessResult check_properness(const BivariateRule& rule, const std::vector<std::vector<double>>& probes,
                                  double tolerance) {
  const auto k = static_cast<std::size_t>(rule.num_outcomes());
  for (const auto& p : probes) {
    if (p.size() != k) throw ValidationError("probe arity differs from the rule's arity");
  }
  PropernessResult result;
  double worst = tolerance;
  for (const auto& p : probes) {
    const double truthful = rule.expected(p, p);
    for (const auto& q : probes) {
      const double margin = truthful - rule.expected(q, p);
      if (margin > worst) {
        worst = margin;
        result.proper = false;
        result.violation = ProperViolation{p, q, margin};
      }
    }
  }
  return result;
}

std::vector<std::vector<double>> binary_grid(int points) {
  if (points < 2) throw ValidationError("grid needs at least two points");
  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double p = static_cast<double>(i) / (points - 1);
    grid.push_back({1.0 - p, p});
  }
  return grid;
}

BivariateRule agent_to_rule(const UtilityMatrix& u) {
  return BivariateRule(
      u.num_outcomes(), "agent",
      [u](std::span<const double> p, int x) { return -u(best_response(u, p), x); }, std::max(1.0, u.max_abs()));
}

PLScoringRule agent_to_pl(const UtilityMatrix& u) {
  if (u.num_outcomes() != 2) throw ValidationError("agent_to_pl requires a binary agent");
  std::vector<double> slopes;
  std::vector<double> intercepts;
  for (int a = 0; a < u.num_actions(); ++a) {
    slopes.push_back(u(a, 0) - u(a, 1));
    intercepts.push_back(-u(a, 0));
  }
  return PLScoringRule::min_of_lines(slopes, intercepts);
}

UtilityMatrix rule_to_agent(const PLScoringRule& rule) {
  std::vector<std::vector<double>> table;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rule.slopes().size(); ++i) {
    const double c = rule.intercept(i);
    table.push_back({-c, -(c + rule.slopes()[i])});
    labels.push_back(fmt::format("segment{}", i));
  }
  return UtilityMatrix::unbounded(std::move(table), std::move(labels));
}

}  // namespace ucal
