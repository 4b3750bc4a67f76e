#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ucal/scoring.hpp"
#include "ucal/simplex.hpp"
#include "ucal/transcript.hpp"
#include "ucal/utility.hpp"

namespace ucal {

// Candidate scoring-rule values y[a][x] at the anchors: the distinct
// predictions in lexicographic order, then the base rate unless it coincides
// with a prediction.
struct ScoreTable {
  int num_outcomes = 2;
  std::vector<std::vector<double>> anchors;
  std::vector<std::vector<double>> y;
  std::size_t base_anchor = 0;
  bool base_merged = false;
};

// Objective data of the U-calibration LP.
struct UcalInstance {
  ScoreTable skeleton;  // anchors only; y is zero
  // counts[a][x]: rounds predicting anchor a with outcome x.
  std::vector<std::vector<double>> counts;
  std::vector<double> outcome_counts;

  // Objective coefficient of y[a][x].
  double coefficient(std::size_t anchor, std::size_t outcome) const;
  double objective(const ScoreTable& table) const;
};

UcalInstance build_ucal_instance(const Transcript& transcript);

struct MaxAgentRegOptions {
  double epsilon = 1e-10;
  std::size_t max_anchors = 2000;
  std::size_t max_iterations = 0;
};

struct LPSolution {
  double value = 0.0;
  // Dual objective; an upper bound on the optimum whenever the dual basis is
  // feasible, which the solver maintains throughout.
  double bound = 0.0;
  ScoreTable table;
  SimplexStatus status = SimplexStatus::kIterationLimit;
  std::size_t iterations = 0;
};

// Maximizes base-rate regret over bounded proper rules, through the LP dual
// min h^T mu subject to G^T mu = c, mu >= 0.
LPSolution max_agent_reg(const Transcript& transcript, const MaxAgentRegOptions& options = {});

struct MembershipViolation {
  std::size_t anchor = 0;  // a
  std::size_t other = 0;   // b
  // <y_a, p_a> - <y_b, p_a>; positive means violated.
  double margin = 0.0;
};

inline constexpr double kMembershipTolerance = 1e-9;

// Checks the box and <y_a, p_a> <= <y_b, p_a> for all anchor pairs; returns
// the first violation in (a, b) order. Box violations report a == b.
std::optional<MembershipViolation> membership_check(const ScoreTable& table,
                                                    double tolerance = kMembershipTolerance);

// Rule whose univariate form is min_a <y_a, p>: at an anchor it scores that
// anchor's row, elsewhere the row of the lowest-index minimizer.
BivariateRule extract_witness(const ScoreTable& table);
BivariateRule extract_witness(const LPSolution& solution);

// Table of a rule evaluated at the instance's anchors.
ScoreTable table_from_rule(const UcalInstance& instance, const BivariateRule& rule);
// One action per anchor: u(a, x) = -y[a][x].
UtilityMatrix table_to_agent(const ScoreTable& table);

// Plain-text, MPS-like dump of the primal LP with deterministic ordering.
std::string dump_lp(const UcalInstance& instance);

}  // namespace ucal
