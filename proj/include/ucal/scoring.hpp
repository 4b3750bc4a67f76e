#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucal/utility.hpp"

namespace ucal {

// Concave piecewise-linear univariate form l(p) on [0, 1], given by its
// values at the knots {0, breakpoints..., 1}.
class PLScoringRule {
 public:
  static constexpr double kConcavityTolerance = 1e-9;

  PLScoringRule(std::vector<double> breakpoints, std::vector<double> values);

  // l(p) = min_i (slopes[i] * p + intercepts[i]).
  static PLScoringRule min_of_lines(std::span<const double> slopes, std::span<const double> intercepts);
  static PLScoringRule linear(double at_zero, double at_one);
  static PLScoringRule vshape(double v);
  // p(1 - p) interpolated on `segments` equal pieces.
  static PLScoringRule brier(int segments);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& knots() const { return knots_; }
  // One slope per segment; segment i spans [knots[i], knots[i + 1]].
  const std::vector<double>& slopes() const { return slopes_; }
  // Intercept of the line carrying segment i.
  double intercept(std::size_t segment) const { return values_[segment] - slopes_[segment] * knots_[segment]; }

  double operator()(double p) const;
  double left_slope(double p) const;
  double right_slope(double p) const;
  // Average of the one-sided slopes; the one-sided slope at 0 and 1.
  double subgradient(double p) const;

  // l(p, 0) = l(p) - p l'(p), l(p, 1) = l(p) + (1 - p) l'(p).
  double score(double p, int outcome) const;

  // Largest |l(p, x)| over all p and x.
  double max_abs_score() const;
  double max_abs_slope() const;
  bool in_bounded_class(double tolerance = 1e-12) const;

  PLScoringRule plus_affine(double c0, double c1) const;

 private:
  std::size_t segment_of(double p) const;

  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> knots_;
  std::vector<double> slopes_;
};

// Scoring rule l(p, x) on the K-simplex.
class BivariateRule {
 public:
  using Evaluator = std::function<double(std::span<const double>, int)>;

  BivariateRule(int num_outcomes, std::string name, Evaluator evaluator, double bound = 1.0);

  // Multiclass Brier 1/2 * ||p - e_x||^2; equals (x - p)^2 for K = 2.
  static BivariateRule brier(int num_outcomes = 2);
  static BivariateRule vshape(double v);
  static BivariateRule from_pl(const PLScoringRule& rule);
  // (1/K) sum_i l_i(p_i, 1[x = i]); bounded whenever every l_i is.
  static BivariateRule separable(std::vector<PLScoringRule> per_outcome);
  static BivariateRule sum(const BivariateRule& a, const BivariateRule& b);

  BivariateRule renamed(std::string name) const;

  int num_outcomes() const { return num_outcomes_; }
  const std::string& name() const { return name_; }
  double bound() const { return bound_; }

  double operator()(std::span<const double> p, int outcome) const { return evaluator_(p, outcome); }
  double binary(double p, int outcome) const;
  // l(p; q) = sum_x q_x l(p, x).
  double expected(std::span<const double> p, std::span<const double> q) const;

 private:
  int num_outcomes_;
  std::string name_;
  Evaluator evaluator_;
  double bound_;
};

BivariateRule bivariate_from_univariate(const PLScoringRule& rule);

// l_v(p) = -|p - v|, with score 0 at p = v for both outcomes.
struct VShapedRule {
  double v = 0.5;

  double univariate(double p) const;
  double score(double p, int outcome) const;
};

struct VDecomposition {
  std::vector<double> centers;
  std::vector<double> weights;
  double c0 = 0.0;
  double c1 = 0.0;

  double weight_sum() const;
  // C_1 p + C_0 - sum_i lambda_i |p - v_i|.
  double univariate(double p) const;
};

VDecomposition v_decompose(const PLScoringRule& rule);

struct ProperViolation {
  std::vector<double> truth;   // p
  std::vector<double> report;  // q
  double margin = 0.0;         // l(p; p) - l(q; p)
};

struct PropernessResult {
  bool proper = true;
  std::optional<ProperViolation> violation;
};

inline constexpr double kPropernessTolerance = 1e-9;

// l(p; p) - l(q; p): positive when misreporting q beats truthful p.
double properness_margin(const BivariateRule& rule, std::span<const double> truth, std::span<const double> report);

// Checks every ordered probe pair; reports the pair with the largest margin.
PropernessResult check_properness(const BivariateRule& rule, const std::vector<std::vector<double>>& probes,
                                  double tolerance = kPropernessTolerance);
std::vector<std::vector<double>> binary_grid(int points);

// l(p, x) = -u(a(p), x) with a(p) the lowest-index best response.
BivariateRule agent_to_rule(const UtilityMatrix& u);
// Binary agent's univariate form min over actions of -(u(a,0)(1-p) + u(a,1)p).
PLScoringRule agent_to_pl(const UtilityMatrix& u);
// One action per linear piece: u(a, x) = -l_a(x) on segment a.
UtilityMatrix rule_to_agent(const PLScoringRule& rule);

}  // namespace ucal
