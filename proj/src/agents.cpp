#include "ucal/agents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "ucal/error.hpp"

namespace ucal {

UtilityMatrix::UtilityMatrix(std::vector<std::vector<double>> table, std::vector<std::string> labels)
    : UtilityMatrix(std::move(table), std::move(labels), true) {}

UtilityMatrix UtilityMatrix::unbounded(std::vector<std::vector<double>> table, std::vector<std::string> labels) {
  return UtilityMatrix(std::move(table), std::move(labels), false);
}

UtilityMatrix::UtilityMatrix(std::vector<std::vector<double>> table, std::vector<std::string> labels, bool check)
    : table_(std::move(table)), labels_(std::move(labels)) {
  if (table_.empty()) throw ValidationError("utility matrix needs at least one action");
  const std::size_t k = table_.front().size();
  if (k < 2) throw ValidationError("utility matrix needs K >= 2 outcomes");
  for (std::size_t a = 0; a < table_.size(); ++a) {
    if (table_[a].size() != k) {
      throw ValidationError(fmt::format("action {} has {} outcomes, expected {}", a, table_[a].size(), k));
    }
    for (std::size_t x = 0; x < k; ++x) {
      const double v = table_[a][x];
      if (!std::isfinite(v)) throw ValidationError(fmt::format("u({}, {}) is not finite", a, x));
      if (check && std::abs(v) > 1.0) {
        throw ValidationError(fmt::format("u({}, {}) = {} outside [-1, 1]", a, x, v));
      }
    }
  }
  if (labels_.empty()) {
    for (std::size_t a = 0; a < table_.size(); ++a) labels_.push_back(fmt::format("a{}", a));
  } else if (labels_.size() != table_.size()) {
    throw ValidationError("utility labels must match the number of actions");
  }
}

bool UtilityMatrix::is_bounded() const { return max_abs() <= 1.0; }

double UtilityMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& row : table_) {
    for (double v : row) m = std::max(m, std::abs(v));
  }
  return m;
}

double UtilityMatrix::expected(int action, std::span<const double> p) const {
  const auto& row = table_[static_cast<std::size_t>(action)];
  double s = 0.0;
  for (std::size_t x = 0; x < row.size(); ++x) s += p[x] * row[x];
  return s;
}

UtilityMatrix UtilityMatrix::scaled(double factor) const {
  auto table = table_;
  for (auto& row : table) {
    for (double& v : row) v *= factor;
  }
  return UtilityMatrix(std::move(table), labels_, false);
}

int best_response(const UtilityMatrix& u, std::span<const double> p) {
  if (static_cast<int>(p.size()) != u.num_outcomes()) {
    throw ValidationError(fmt::format("prediction has {} coordinates, agent expects {}", p.size(), u.num_outcomes()));
  }
  int best = 0;
  double best_value = u.expected(0, p);
  for (int a = 1; a < u.num_actions(); ++a) {
    const double value = u.expected(a, p);
    if (value > best_value) {
      best = a;
      best_value = value;
    }
  }
  return best;
}

int best_response_binary(const UtilityMatrix& u, double p) {
  const std::array<double, 2> point{1.0 - p, p};
  return best_response(u, point);
}

std::vector<double> hedge_distribution(const UtilityMatrix& u, std::span<const int> history, double eta) {
  if (!(eta > 0.0)) throw ValidationError("hedge learning rate must be positive");
  std::vector<double> counts(static_cast<std::size_t>(u.num_outcomes()), 0.0);
  for (int x : history) {
    if (x < 0 || x >= u.num_outcomes()) throw ValidationError(fmt::format("outcome {} out of range", x));
    counts[static_cast<std::size_t>(x)] += 1.0;
  }
  std::vector<double> logits(static_cast<std::size_t>(u.num_actions()));
  for (int a = 0; a < u.num_actions(); ++a) logits[static_cast<std::size_t>(a)] = eta * u.expected(a, counts);
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

int hedge_agent_step(const UtilityMatrix& u, std::span<const int> history, double eta, CounterRng& rng) {
  const auto dist = hedge_distribution(u, history, eta);
  double r = rng.uniform();
  for (std::size_t a = 0; a + 1 < dist.size(); ++a) {
    if (r < dist[a]) return static_cast<int>(a);
    r -= dist[a];
  }
  return static_cast<int>(dist.size()) - 1;
}

SwapFunction best_swap(const UtilityMatrix& u, const Transcript& transcript) {
  if (u.num_outcomes() != transcript.num_outcomes()) {
    throw ValidationError("agent and transcript have different numbers of outcomes");
  }
  const auto actions = static_cast<std::size_t>(u.num_actions());
  const auto k = static_cast<std::size_t>(u.num_outcomes());
  std::vector<std::vector<double>> counts(actions, std::vector<double>(k, 0.0));
  std::vector<bool> played(actions, false);
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    const auto a = static_cast<std::size_t>(best_response(u, transcript.prediction(t)));
    played[a] = true;
    counts[a][static_cast<std::size_t>(transcript.outcome(t))] += 1.0;
  }
  SwapFunction pi(actions);
  for (std::size_t a = 0; a < actions; ++a) {
    pi[a] = static_cast<int>(a);
    if (!played[a]) continue;
    double best_value = u.expected(static_cast<int>(a), counts[a]);
    for (std::size_t b = 0; b < actions; ++b) {
      const double value = u.expected(static_cast<int>(b), counts[a]);
      if (value > best_value) {
        best_value = value;
        pi[a] = static_cast<int>(b);
      }
    }
  }
  return pi;
}

UtilityMatrix squared_loss_agent(const Transcript& transcript) {
  require_binary(transcript, "squared_loss_agent");
  std::set<double> actions;
  for (const auto& g : group_by_prediction(transcript)) {
    actions.insert(g.point[1]);
    actions.insert(static_cast<double>(g.outcome_counts[1]) / static_cast<double>(g.rounds));
  }
  std::vector<std::vector<double>> table;
  std::vector<std::string> labels;
  for (double a : actions) {
    table.push_back({-(a * a), -((1.0 - a) * (1.0 - a))});
    labels.push_back(fmt::format("{:.17g}", a));
  }
  return UtilityMatrix(std::move(table), std::move(labels));
}

}  // namespace ucal
