#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace ucal {

struct SparseColumn {
  std::vector<int> rows;
  std::vector<double> values;
};

// minimize cost^T x  subject to  A x = rhs, x >= 0, with A stored by column.
struct StandardFormLP {
  int num_rows = 0;
  std::vector<SparseColumn> columns;
  std::vector<double> cost;
  std::vector<double> rhs;

  int add_column(SparseColumn column, double cost_coefficient);
};

enum class SimplexStatus { kOptimal, kUnbounded, kInfeasible, kIterationLimit };
std::string_view to_string(SimplexStatus status);

struct SimplexOptions {
  // Optimality tolerance on reduced costs.
  double tolerance = 1e-10;
  // 0 picks a limit from the instance size.
  std::size_t max_iterations = 0;
  std::size_t refactor_interval = 64;
  // Degenerate pivots in a row before switching from Dantzig to Bland pricing.
  std::size_t degenerate_streak_limit = 32;
  // A primal feasible basis, one column per row; skips phase 1.
  std::optional<std::vector<int>> initial_basis;
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  // Simplex multipliers: B^T duals = cost_B.
  std::vector<double> duals;
  std::vector<int> basis;
  std::size_t iterations = 0;
};

// Revised simplex with an explicit dense basis inverse, Dantzig pricing and a
// Bland fallback on degenerate streaks. Without an initial basis, runs a
// phase 1 on artificial variables.
SimplexResult solve_standard_form(const StandardFormLP& lp, const SimplexOptions& options = {});

}  // namespace ucal
