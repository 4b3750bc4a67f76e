#include "ucal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "ucal/error.hpp"

namespace ucal::oracle {

namespace {

double naive_score(double p, int x, double v) {
  if (p == v) return 0.0;
  if (x == 0) return p > v ? v : -v;
  return p < v ? 1.0 - v : -(1.0 - v);
}

double ones_fraction(const Transcript& t) {
  std::size_t ones = 0;
  for (std::size_t i = 0; i < t.size(); ++i) ones += t.outcome(i) == 1 ? 1 : 0;
  return static_cast<double>(ones) / static_cast<double>(t.size());
}

}  // namespace

double vreg_naive(double v, const Transcript& transcript) {
  if (transcript.num_outcomes() != 2) throw ValidationError("vreg_naive requires a binary transcript");
  const double beta = ones_fraction(transcript);
  long double total = 0.0L;
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    const int x = transcript.outcome(i);
    const double p = transcript.prediction(i)[1];
    total += static_cast<long double>(naive_score(p, x, v)) - static_cast<long double>(naive_score(beta, x, v));
  }
  return static_cast<double>(total);
}

double vcal_grid(const Transcript& transcript, std::size_t uniform_points) {
  if (transcript.num_outcomes() != 2) throw ValidationError("vcal_grid requires a binary transcript");
  const double beta = ones_fraction(transcript);
  std::set<double> predicted;
  for (std::size_t i = 0; i < transcript.size(); ++i) predicted.insert(transcript.prediction(i)[1]);

  std::set<double> ends(predicted.begin(), predicted.end());
  ends.insert(0.0);
  ends.insert(1.0);
  ends.insert(beta);
  std::vector<double> grid{beta};
  const std::vector<double> sorted(ends.begin(), ends.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double a = sorted[i];
    const double b = sorted[i + 1];
    const double delta = std::min(1e-13, (b - a) / 3.0);
    grid.push_back(0.5 * (a + b));
    grid.push_back(a + delta);
    grid.push_back(b - delta);
  }
  if (uniform_points >= 2) {
    for (std::size_t i = 0; i < uniform_points; ++i) {
      grid.push_back(static_cast<double>(i) / static_cast<double>(uniform_points - 1));
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double v : grid) {
    if (predicted.count(v) != 0 && v != beta) continue;
    best = std::max(best, vreg_naive(v, transcript));
  }
  return best;
}

namespace {

// Objective and constraint data written out directly from the transcript.
struct VertexProblem {
  std::size_t vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;  // rows[i] . y <= rhs[i]
  std::vector<double> rhs;
};

VertexProblem build_problem(const Transcript& transcript) {
  const double beta = ones_fraction(transcript);
  std::set<double> distinct;
  for (std::size_t i = 0; i < transcript.size(); ++i) distinct.insert(transcript.prediction(i)[1]);
  if (distinct.size() > 3) throw ValidationError("vertex enumeration handles at most 3 distinct predictions");
  std::vector<double> anchors(distinct.begin(), distinct.end());
  auto base = std::find(anchors.begin(), anchors.end(), beta);
  std::size_t base_index = static_cast<std::size_t>(base - anchors.begin());
  if (base == anchors.end()) anchors.push_back(beta);

  VertexProblem prob;
  prob.vars = 2 * anchors.size();
  prob.objective.assign(prob.vars, 0.0);
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    const double p = transcript.prediction(i)[1];
    const auto a = static_cast<std::size_t>(std::find(anchors.begin(), anchors.end(), p) - anchors.begin());
    const auto x = static_cast<std::size_t>(transcript.outcome(i));
    prob.objective[2 * a + x] += 1.0;
    prob.objective[2 * base_index + x] -= 1.0;
  }
  for (std::size_t j = 0; j < prob.vars; ++j) {
    std::vector<double> up(prob.vars, 0.0);
    up[j] = 1.0;
    prob.rows.push_back(up);
    prob.rhs.push_back(1.0);
    up[j] = -1.0;
    prob.rows.push_back(up);
    prob.rhs.push_back(1.0);
  }
  // Expected score of reporting anchor a under truth a is at most that of b.
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    for (std::size_t b = 0; b < anchors.size(); ++b) {
      if (a == b) continue;
      std::vector<double> row(prob.vars, 0.0);
      const double q = anchors[a];
      row[2 * a] += 1.0 - q;
      row[2 * a + 1] += q;
      row[2 * b] -= 1.0 - q;
      row[2 * b + 1] -= q;
      prob.rows.push_back(row);
      prob.rhs.push_back(0.0);
    }
  }
  return prob;
}

// Solves the square system rows * y = rhs by elimination with partial pivoting.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& y) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  y.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * y[k];
    y[c] = s / a[c][c];
  }
  return true;
}

class VertexSearch {
 public:
  explicit VertexSearch(const VertexProblem& prob) : prob_(prob) {}

  double run() {
    std::vector<std::vector<double>> echelon;
    dfs(0, echelon);
    return best_;
  }

 private:
  // Reduces `row` against the echelon rows; returns false if it is dependent.
  static bool extend(std::vector<std::vector<double>>& echelon, std::vector<double> row) {
    for (const auto& e : echelon) {
      std::size_t lead = 0;
      while (std::abs(e[lead]) < 1e-12) ++lead;
      const double f = row[lead] / e[lead];
      if (f != 0.0) {
        for (std::size_t k = 0; k < row.size(); ++k) row[k] -= f * e[k];
      }
    }
    if (std::all_of(row.begin(), row.end(), [](double v) { return std::abs(v) < 1e-10; })) return false;
    echelon.push_back(std::move(row));
    return true;
  }

  void dfs(std::size_t start, std::vector<std::vector<double>>& echelon) {
    if (echelon.size() == prob_.vars) {
      evaluate();
      return;
    }
    const std::size_t need = prob_.vars - echelon.size();
    for (std::size_t i = start; i + need <= prob_.rows.size(); ++i) {
      auto next = echelon;
      if (!extend(next, prob_.rows[i])) continue;
      chosen_.push_back(i);
      dfs(i + 1, next);
      chosen_.pop_back();
    }
  }

  void evaluate() {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i : chosen_) {
      a.push_back(prob_.rows[i]);
      b.push_back(prob_.rhs[i]);
    }
    std::vector<double> y;
    if (!solve_square(a, b, y)) return;
    for (std::size_t i = 0; i < prob_.rows.size(); ++i) {
      double lhs = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) lhs += prob_.rows[i][k] * y[k];
      if (lhs > prob_.rhs[i] + 1e-9) return;
    }
    double value = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) value += prob_.objective[k] * y[k];
    best_ = std::max(best_, value);
  }

  const VertexProblem& prob_;
  std::vector<std::size_t> chosen_;
  double best_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

double max_agent_reg_vertex(const Transcript& transcript) {
  if (transcript.num_outcomes() != 2) throw ValidationError("vertex enumeration requires a binary transcript");
  return VertexSearch(build_problem(transcript)).run();
}

}  // namespace ucal::oracle
