#include "ucal/ucal_lp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ucal/error.hpp"
#include "ucal/summation.hpp"

namespace ucal {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double UcalInstance::coefficient(std::size_t anchor, std::size_t outcome) const {
  double c = counts[anchor][outcome];
  if (anchor == skeleton.base_anchor) c -= outcome_counts[outcome];
  return c;
}

double UcalInstance::objective(const ScoreTable& table) const {
  CompensatedSum s;
  for (std::size_t a = 0; a < table.y.size(); ++a) {
    for (std::size_t x = 0; x < table.y[a].size(); ++x) s += coefficient(a, x) * table.y[a][x];
  }
  return s.value();
}

UcalInstance build_ucal_instance(const Transcript& transcript) {
  UcalInstance inst;
  const auto k = static_cast<std::size_t>(transcript.num_outcomes());
  inst.skeleton.num_outcomes = transcript.num_outcomes();
  const auto beta = transcript.base_rate();
  for (const auto& g : group_by_prediction(transcript)) {
    if (g.point == beta) {
      inst.skeleton.base_anchor = inst.skeleton.anchors.size();
      inst.skeleton.base_merged = true;
    }
    inst.skeleton.anchors.push_back(g.point);
    inst.counts.emplace_back(g.outcome_counts.begin(), g.outcome_counts.end());
  }
  if (!inst.skeleton.base_merged) {
    inst.skeleton.base_anchor = inst.skeleton.anchors.size();
    inst.skeleton.anchors.push_back(beta);
    inst.counts.emplace_back(k, 0.0);
  }
  const auto counts = transcript.outcome_counts();
  inst.outcome_counts.assign(counts.begin(), counts.end());
  inst.skeleton.y.assign(inst.skeleton.anchors.size(), std::vector<double>(k, 0.0));
  return inst;
}

LPSolution max_agent_reg(const Transcript& transcript, const MaxAgentRegOptions& options) {
  if (!(options.epsilon > 0.0)) throw ValidationError("LP tolerance epsilon must be positive");
  const UcalInstance inst = build_ucal_instance(transcript);
  const auto& anchors = inst.skeleton.anchors;
  const std::size_t predicted = anchors.size() - (inst.skeleton.base_merged ? 0 : 1);
  if (predicted > options.max_anchors) {
    throw ValidationError(
        fmt::format("{} distinct predictions exceed the LP cap of {}", predicted, options.max_anchors));
  }
  const std::size_t na = anchors.size();
  const auto k = static_cast<std::size_t>(transcript.num_outcomes());
  const std::size_t n = na * k;
  auto var = [k](std::size_t a, std::size_t x) { return static_cast<int>(a * k + x); };

  // Dual: one row per y variable; one column per primal inequality.
  StandardFormLP dual;
  dual.num_rows = static_cast<int>(n);
  dual.rhs.resize(n);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t x = 0; x < k; ++x) dual.rhs[static_cast<std::size_t>(var(a, x))] = inst.coefficient(a, x);
  }
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < na; ++b) {
      if (a == b) continue;
      SparseColumn col;
      for (std::size_t x = 0; x < k; ++x) {
        const double p = anchors[a][x];
        if (p == 0.0) continue;
        col.rows.push_back(var(a, x));
        col.values.push_back(p);
        col.rows.push_back(var(b, x));
        col.values.push_back(-p);
      }
      dual.add_column(std::move(col), 0.0);
    }
  }
  std::vector<int> basis(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int upper = dual.add_column(SparseColumn{{static_cast<int>(j)}, {1.0}}, 1.0);
    const int lower = dual.add_column(SparseColumn{{static_cast<int>(j)}, {-1.0}}, 1.0);
    basis[j] = dual.rhs[j] >= 0.0 ? upper : lower;
  }

  SimplexOptions simplex;
  simplex.tolerance = options.epsilon;
  simplex.max_iterations = options.max_iterations;
  simplex.initial_basis = std::move(basis);
  const SimplexResult result = solve_standard_form(dual, simplex);

  LPSolution sol;
  sol.status = result.status;
  sol.iterations = result.iterations;
  sol.bound = result.objective;
  sol.table = inst.skeleton;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t x = 0; x < k; ++x) {
      sol.table.y[a][x] = std::clamp(result.duals[static_cast<std::size_t>(var(a, x))], -1.0, 1.0);
    }
  }
  sol.value = inst.objective(sol.table);
  return sol;
}

std::optional<MembershipViolation> membership_check(const ScoreTable& table, double tolerance) {
  if (table.y.size() != table.anchors.size()) throw ValidationError("score table rows differ from anchor count");
  for (std::size_t a = 0; a < table.y.size(); ++a) {
    if (table.y[a].size() != static_cast<std::size_t>(table.num_outcomes)) {
      throw ValidationError("score table row arity differs from K");
    }
    for (double v : table.y[a]) {
      if (std::abs(v) > 1.0 + tolerance) return MembershipViolation{a, a, std::abs(v) - 1.0};
    }
  }
  for (std::size_t a = 0; a < table.y.size(); ++a) {
    const double own = dot(table.y[a], table.anchors[a]);
    for (std::size_t b = 0; b < table.y.size(); ++b) {
      if (a == b) continue;
      const double margin = own - dot(table.y[b], table.anchors[a]);
      if (margin > tolerance) return MembershipViolation{a, b, margin};
    }
  }
  return std::nullopt;
}

BivariateRule extract_witness(const ScoreTable& table) {
  if (table.y.empty()) throw ValidationError("score table has no anchors");
  return BivariateRule(table.num_outcomes, "lp_witness", [table](std::span<const double> p, int x) {
    const auto ux = static_cast<std::size_t>(x);
    for (std::size_t a = 0; a < table.anchors.size(); ++a) {
      if (std::equal(p.begin(), p.end(), table.anchors[a].begin(), table.anchors[a].end())) return table.y[a][ux];
    }
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t a = 0; a < table.y.size(); ++a) {
      double v = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) v += table.y[a][i] * p[i];
      if (a == 0 || v < best_value) {
        best = a;
        best_value = v;
      }
    }
    return table.y[best][ux];
  });
}

BivariateRule extract_witness(const LPSolution& solution) { return extract_witness(solution.table); }

ScoreTable table_from_rule(const UcalInstance& instance, const BivariateRule& rule) {
  if (rule.num_outcomes() != instance.skeleton.num_outcomes) throw ValidationError("rule arity differs from K");
  ScoreTable table = instance.skeleton;
  for (std::size_t a = 0; a < table.anchors.size(); ++a) {
    for (int x = 0; x < table.num_outcomes; ++x) table.y[a][static_cast<std::size_t>(x)] = rule(table.anchors[a], x);
  }
  return table;
}

UtilityMatrix table_to_agent(const ScoreTable& table) {
  std::vector<std::vector<double>> u;
  for (const auto& row : table.y) {
    std::vector<double> r(row.size());
    std::transform(row.begin(), row.end(), r.begin(), [](double v) { return -v; });
    u.push_back(std::move(r));
  }
  return UtilityMatrix::unbounded(std::move(u));
}

std::string dump_lp(const UcalInstance& instance) {
  const auto& anchors = instance.skeleton.anchors;
  const std::size_t na = anchors.size();
  const auto k = static_cast<std::size_t>(instance.skeleton.num_outcomes);
  std::string out = "NAME          UCAL\nOBJSENSE\n    MAX\nROWS\n N  OBJ\n";
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < na; ++b) {
      if (a != b) out += fmt::format(" L  P{}_{}\n", a, b);
    }
  }
  out += "COLUMNS\n";
  for (std::size_t c = 0; c < na; ++c) {
    for (std::size_t x = 0; x < k; ++x) {
      const std::string name = fmt::format("Y{}_{}", c, x);
      out += fmt::format("    {:<12} OBJ {:.17g}\n", name, instance.coefficient(c, x));
      // y[c][x] appears in P{a}_{b} as +p_a[x] when c = a and -p_a[x] when c = b.
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < na; ++b) {
          if (a == b || anchors[a][x] == 0.0) continue;
          if (c == a) out += fmt::format("    {:<12} P{}_{} {:.17g}\n", name, a, b, anchors[a][x]);
          if (c == b) out += fmt::format("    {:<12} P{}_{} {:.17g}\n", name, a, b, -anchors[a][x]);
        }
      }
    }
  }
  out += "RHS\n";
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < na; ++b) {
      if (a != b) out += fmt::format("    RHS          P{}_{} 0\n", a, b);
    }
  }
  out += "BOUNDS\n";
  for (std::size_t c = 0; c < na; ++c) {
    for (std::size_t x = 0; x < k; ++x) {
      out += fmt::format(" LO BND       Y{}_{} -1\n UP BND       Y{}_{} 1\n", c, x, c, x);
    }
  }
  out += "ENDATA\n";
  return out;
}

}  // namespace ucal
