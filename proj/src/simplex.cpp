#include "ucal/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ucal/error.hpp"

namespace ucal {

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kFeasibilityTolerance = 1e-9;
constexpr double kRatioTieTolerance = 1e-12;

class RevisedSimplex {
 public:
  RevisedSimplex(int rows, const std::vector<SparseColumn>& columns, const std::vector<double>& rhs,
                 std::vector<int> basis, const SimplexOptions& options)
      : m_(static_cast<std::size_t>(rows)),
        columns_(columns),
        rhs_(rhs),
        basis_(std::move(basis)),
        options_(options),
        binv_(m_ * m_, 0.0),
        x_basic_(m_, 0.0) {
    refactor();
  }

  void refactor() {
    // Gauss-Jordan inversion of the dense basis matrix with partial pivoting.
    std::vector<double> b(m_ * m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const auto& col = columns_[static_cast<std::size_t>(basis_[k])];
      for (std::size_t e = 0; e < col.rows.size(); ++e) b[static_cast<std::size_t>(col.rows[e]) * m_ + k] = col.values[e];
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r) {
        if (std::abs(b[r * m_ + c]) > std::abs(b[piv * m_ + c])) piv = r;
      }
      if (std::abs(b[piv * m_ + c]) < 1e-13) throw SolverError("simplex basis became singular");
      if (piv != c) {
        std::swap_ranges(b.begin() + static_cast<std::ptrdiff_t>(piv * m_),
                         b.begin() + static_cast<std::ptrdiff_t>((piv + 1) * m_),
                         b.begin() + static_cast<std::ptrdiff_t>(c * m_));
        std::swap_ranges(binv_.begin() + static_cast<std::ptrdiff_t>(piv * m_),
                         binv_.begin() + static_cast<std::ptrdiff_t>((piv + 1) * m_),
                         binv_.begin() + static_cast<std::ptrdiff_t>(c * m_));
      }
      const double inv = 1.0 / b[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        b[c * m_ + k] *= inv;
        binv_[c * m_ + k] *= inv;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        const double f = b[r * m_ + c];
        if (r == c || f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          b[r * m_ + k] -= f * b[c * m_ + k];
          binv_[r * m_ + k] -= f * binv_[c * m_ + k];
        }
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * rhs_[k];
      x_basic_[i] = (s < 0.0 && s > -kFeasibilityTolerance) ? 0.0 : s;
    }
    since_refactor_ = 0;
  }

  bool primal_feasible() const {
    return std::all_of(x_basic_.begin(), x_basic_.end(), [](double v) { return v >= -kFeasibilityTolerance; });
  }

  std::vector<double> duals(const std::vector<double>& cost) const {
    std::vector<double> pi(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double c = cost[static_cast<std::size_t>(basis_[k])];
      if (c == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) pi[i] += c * binv_[k * m_ + i];
    }
    return pi;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> alpha(m_, 0.0);
    const auto& col = columns_[static_cast<std::size_t>(j)];
    for (std::size_t e = 0; e < col.rows.size(); ++e) {
      const auto r = static_cast<std::size_t>(col.rows[e]);
      const double v = col.values[e];
      for (std::size_t i = 0; i < m_; ++i) alpha[i] += binv_[i * m_ + r] * v;
    }
    return alpha;
  }

  double row_entry(std::size_t r, int j) const {
    const auto& col = columns_[static_cast<std::size_t>(j)];
    double s = 0.0;
    for (std::size_t e = 0; e < col.rows.size(); ++e) s += binv_[r * m_ + static_cast<std::size_t>(col.rows[e])] * col.values[e];
    return s;
  }

  void pivot(int entering, std::size_t r, const std::vector<double>& alpha) {
    const double theta = x_basic_[r] / alpha[r];
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r) x_basic_[i] -= theta * alpha[i];
    }
    x_basic_[r] = theta;
    const double inv = 1.0 / alpha[r];
    for (std::size_t k = 0; k < m_; ++k) binv_[r * m_ + k] *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      const double f = alpha[i];
      if (i == r || f == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) binv_[i * m_ + k] -= f * binv_[r * m_ + k];
    }
    basis_[r] = entering;
    if (++since_refactor_ >= options_.refactor_interval) refactor();
  }

  SimplexStatus run(const std::vector<double>& cost, const std::vector<bool>& can_enter, std::size_t& iterations,
                    std::size_t max_iterations) {
    const std::size_t n = columns_.size();
    std::vector<bool> in_basis(n, false);
    std::size_t degenerate_streak = 0;
    while (true) {
      std::fill(in_basis.begin(), in_basis.end(), false);
      for (int j : basis_) in_basis[static_cast<std::size_t>(j)] = true;
      const bool bland = degenerate_streak >= options_.degenerate_streak_limit;
      const auto pi = duals(cost);
      int entering = -1;
      double best = -options_.tolerance;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_basis[j] || !can_enter[j]) continue;
        const auto& col = columns_[j];
        double d = cost[j];
        for (std::size_t e = 0; e < col.rows.size(); ++e) d -= pi[static_cast<std::size_t>(col.rows[e])] * col.values[e];
        if (d < best) {
          entering = static_cast<int>(j);
          if (bland) break;
          best = d;
        }
      }
      if (entering < 0) return SimplexStatus::kOptimal;
      if (iterations >= max_iterations) return SimplexStatus::kIterationLimit;

      const auto alpha = ftran(entering);
      std::size_t leave = m_;
      double best_theta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (alpha[i] <= kPivotTolerance) continue;
        const double theta = std::max(x_basic_[i], 0.0) / alpha[i];
        bool take = false;
        if (theta < best_theta - kRatioTieTolerance) {
          take = true;
        } else if (theta <= best_theta + kRatioTieTolerance) {
          take = bland ? basis_[i] < basis_[leave] : alpha[i] > alpha[leave];
        }
        if (take) {
          leave = i;
          best_theta = std::min(best_theta, theta);
        }
      }
      if (leave == m_) return SimplexStatus::kUnbounded;
      if (x_basic_[leave] < 0.0) x_basic_[leave] = 0.0;
      degenerate_streak = best_theta <= kRatioTieTolerance ? degenerate_streak + 1 : 0;
      pivot(entering, leave, alpha);
      ++iterations;
    }
  }

  double objective(const std::vector<double>& cost) const {
    double s = 0.0;
    for (std::size_t k = 0; k < m_; ++k) s += cost[static_cast<std::size_t>(basis_[k])] * x_basic_[k];
    return s;
  }

  std::size_t rows() const { return m_; }
  const std::vector<int>& basis() const { return basis_; }
  const std::vector<double>& x_basic() const { return x_basic_; }
  void zero_basic(std::size_t r) { x_basic_[r] = 0.0; }

 private:
  std::size_t m_;
  const std::vector<SparseColumn>& columns_;
  const std::vector<double>& rhs_;
  std::vector<int> basis_;
  const SimplexOptions& options_;
  std::vector<double> binv_;
  std::vector<double> x_basic_;
  std::size_t since_refactor_ = 0;
};

void validate(const StandardFormLP& lp) {
  if (lp.num_rows < 1) throw ValidationError("LP needs at least one row");
  if (lp.cost.size() != lp.columns.size()) throw ValidationError("LP cost vector length differs from column count");
  if (lp.rhs.size() != static_cast<std::size_t>(lp.num_rows)) throw ValidationError("LP rhs length differs from row count");
  for (std::size_t j = 0; j < lp.columns.size(); ++j) {
    const auto& col = lp.columns[j];
    if (col.rows.size() != col.values.size()) throw ValidationError(fmt::format("LP column {} is malformed", j));
    for (int r : col.rows) {
      if (r < 0 || r >= lp.num_rows) throw ValidationError(fmt::format("LP column {} references row {}", j, r));
    }
  }
}

SimplexResult collect(const RevisedSimplex& solver, SimplexStatus status, const std::vector<double>& cost,
                      std::size_t num_structural, std::size_t iterations) {
  SimplexResult result;
  result.status = status;
  result.iterations = iterations;
  result.objective = solver.objective(cost);
  result.x.assign(num_structural, 0.0);
  for (std::size_t k = 0; k < solver.rows(); ++k) {
    const auto j = static_cast<std::size_t>(solver.basis()[k]);
    if (j < num_structural) result.x[j] = solver.x_basic()[k];
  }
  result.duals = solver.duals(cost);
  result.basis = solver.basis();
  return result;
}

}  // namespace

int StandardFormLP::add_column(SparseColumn column, double cost_coefficient) {
  columns.push_back(std::move(column));
  cost.push_back(cost_coefficient);
  return static_cast<int>(columns.size()) - 1;
}

std::string_view to_string(SimplexStatus status) {
  switch (status) {
    case SimplexStatus::kOptimal:
      return "optimal";
    case SimplexStatus::kUnbounded:
      return "unbounded";
    case SimplexStatus::kInfeasible:
      return "infeasible";
    case SimplexStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

SimplexResult solve_standard_form(const StandardFormLP& lp, const SimplexOptions& options) {
  validate(lp);
  const auto m = static_cast<std::size_t>(lp.num_rows);
  const std::size_t n = lp.columns.size();
  const std::size_t max_iterations = options.max_iterations ? options.max_iterations : 50 * (m + n) + 1000;
  std::size_t iterations = 0;

  if (options.initial_basis) {
    if (options.initial_basis->size() != m) throw ValidationError("initial basis size differs from row count");
    RevisedSimplex solver(lp.num_rows, lp.columns, lp.rhs, *options.initial_basis, options);
    if (!solver.primal_feasible()) throw ValidationError("initial basis is not primal feasible");
    const std::vector<bool> can_enter(n, true);
    const auto status = solver.run(lp.cost, can_enter, iterations, max_iterations);
    return collect(solver, status, lp.cost, n, iterations);
  }

  // Phase 1: flip rows to make rhs non-negative and add one artificial per row.
  std::vector<double> sign(m, 1.0);
  std::vector<double> rhs = lp.rhs;
  for (std::size_t i = 0; i < m; ++i) {
    if (rhs[i] < 0.0) {
      sign[i] = -1.0;
      rhs[i] = -rhs[i];
    }
  }
  std::vector<SparseColumn> columns = lp.columns;
  for (auto& col : columns) {
    for (std::size_t e = 0; e < col.rows.size(); ++e) col.values[e] *= sign[static_cast<std::size_t>(col.rows[e])];
  }
  std::vector<int> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    columns.push_back(SparseColumn{{static_cast<int>(i)}, {1.0}});
    basis[i] = static_cast<int>(n + i);
  }
  std::vector<double> phase1_cost(n + m, 0.0);
  std::fill(phase1_cost.begin() + static_cast<std::ptrdiff_t>(n), phase1_cost.end(), 1.0);
  RevisedSimplex solver(lp.num_rows, columns, rhs, basis, options);
  std::vector<bool> can_enter(n + m, true);
  auto status = solver.run(phase1_cost, can_enter, iterations, max_iterations);
  if (status == SimplexStatus::kIterationLimit) return collect(solver, status, phase1_cost, n, iterations);
  double rhs_scale = 1.0;
  for (double b : rhs) rhs_scale = std::max(rhs_scale, b);
  if (solver.objective(phase1_cost) > kFeasibilityTolerance * rhs_scale) {
    auto result = collect(solver, SimplexStatus::kInfeasible, phase1_cost, n, iterations);
    result.objective = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  // Pivot zero-level artificials out where a structural column can replace them.
  for (std::size_t r = 0; r < m; ++r) {
    if (static_cast<std::size_t>(solver.basis()[r]) < n) continue;
    const std::vector<int>& current = solver.basis();
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(current.begin(), current.end(), static_cast<int>(j)) != current.end()) continue;
      if (std::abs(solver.row_entry(r, static_cast<int>(j))) > kPivotTolerance) {
        solver.zero_basic(r);
        solver.pivot(static_cast<int>(j), r, solver.ftran(static_cast<int>(j)));
        break;
      }
    }
  }

  std::vector<double> phase2_cost = lp.cost;
  phase2_cost.resize(n + m, 0.0);
  std::fill(can_enter.begin() + static_cast<std::ptrdiff_t>(n), can_enter.end(), false);
  status = solver.run(phase2_cost, can_enter, iterations, max_iterations);
  auto result = collect(solver, status, phase2_cost, n, iterations);
  for (std::size_t i = 0; i < m; ++i) result.duals[i] *= sign[i];
  return result;
}

}  // namespace ucal
