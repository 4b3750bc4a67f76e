#include "ucal/transcript.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "ucal/error.hpp"

namespace ucal {

Transcript::Transcript(int num_outcomes, std::vector<int> outcomes,
                       std::vector<double> predictions)
    : num_outcomes_(num_outcomes),
      outcomes_(std::move(outcomes)),
      predictions_(std::move(predictions)) {
  if (num_outcomes_ < 2) {
    throw ValidationError(fmt::format("transcript needs K >= 2 outcomes, got {}", num_outcomes_));
  }
  if (outcomes_.empty()) throw ValidationError("transcript must contain at least one round");
  const auto k = static_cast<std::size_t>(num_outcomes_);
  if (predictions_.size() != outcomes_.size() * k) {
    throw ValidationError("prediction and outcome sequences have different lengths");
  }
  for (std::size_t t = 0; t < outcomes_.size(); ++t) {
    if (outcomes_[t] < 0 || outcomes_[t] >= num_outcomes_) {
      throw ValidationError(
          fmt::format("round {}: outcome {} outside [0, {})", t + 1, outcomes_[t], num_outcomes_));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double coord = predictions_[t * k + i];
      if (!(coord >= 0.0) || !std::isfinite(coord)) {
        throw ValidationError(fmt::format("round {}: prediction coordinate {} is {}", t + 1, i, coord));
      }
      total += coord;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      throw ValidationError(fmt::format("round {}: prediction sums to {}", t + 1, total));
    }
  }
}

Transcript Transcript::binary(std::vector<int> outcomes, const std::vector<double>& predictions) {
  if (predictions.size() != outcomes.size()) {
    throw ValidationError("prediction and outcome sequences have different lengths");
  }
  std::vector<double> rows;
  rows.reserve(2 * predictions.size());
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    const double p = predictions[t];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(fmt::format("round {}: binary prediction {} outside [0, 1]", t + 1, p));
    }
    rows.push_back(1.0 - p);
    rows.push_back(p);
  }
  return Transcript(2, std::move(outcomes), std::move(rows));
}

Transcript Transcript::multiclass(int num_outcomes, std::vector<int> outcomes,
                                  const std::vector<std::vector<double>>& predictions) {
  std::vector<double> rows;
  rows.reserve(predictions.size() * static_cast<std::size_t>(std::max(num_outcomes, 0)));
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    if (static_cast<int>(predictions[t].size()) != num_outcomes) {
      throw ValidationError(fmt::format("round {}: prediction has {} coordinates, expected {}", t + 1,
                                        predictions[t].size(), num_outcomes));
    }
    rows.insert(rows.end(), predictions[t].begin(), predictions[t].end());
  }
  return Transcript(num_outcomes, std::move(outcomes), std::move(rows));
}

std::vector<double> Transcript::binary_predictions() const {
  require_binary(*this, "binary_predictions");
  std::vector<double> out(size());
  for (std::size_t t = 0; t < size(); ++t) out[t] = binary_prediction(t);
  return out;
}

std::vector<std::size_t> Transcript::outcome_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_outcomes_), 0);
  for (int x : outcomes_) ++counts[static_cast<std::size_t>(x)];
  return counts;
}

std::vector<double> Transcript::base_rate() const {
  const auto counts = outcome_counts();
  std::vector<double> beta(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    beta[i] = static_cast<double>(counts[i]) / static_cast<double>(size());
  }
  return beta;
}

double Transcript::binary_base_rate() const {
  require_binary(*this, "binary_base_rate");
  return base_rate()[1];
}

Transcript Transcript::one_vs_all(int outcome) const {
  if (outcome < 0 || outcome >= num_outcomes_) {
    throw ValidationError(fmt::format("one_vs_all: outcome {} outside [0, {})", outcome, num_outcomes_));
  }
  std::vector<int> xs(size());
  std::vector<double> ps(size());
  for (std::size_t t = 0; t < size(); ++t) {
    xs[t] = outcomes_[t] == outcome ? 1 : 0;
    ps[t] = prediction(t)[static_cast<std::size_t>(outcome)];
  }
  return binary(std::move(xs), ps);
}

Transcript Transcript::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != size()) throw ValidationError("permutation length differs from transcript length");
  const auto k = static_cast<std::size_t>(num_outcomes_);
  std::vector<int> xs(size());
  std::vector<double> rows(predictions_.size());
  std::vector<bool> seen(size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const std::size_t src = perm[i];
    if (src >= size()) throw ValidationError("permutation index out of range");
    if (seen[src]) throw ValidationError("permutation repeats an index");
    seen[src] = true;
    xs[i] = outcomes_[src];
    std::copy_n(predictions_.begin() + static_cast<std::ptrdiff_t>(src * k), k,
                rows.begin() + static_cast<std::ptrdiff_t>(i * k));
  }
  return Transcript(num_outcomes_, std::move(xs), std::move(rows));
}

void require_binary(const Transcript& transcript, const char* operation) {
  if (!transcript.is_binary()) {
    throw ValidationError(
        fmt::format("{} requires a binary transcript, got K = {}", operation, transcript.num_outcomes()));
  }
}

std::vector<PredictionGroup> group_by_prediction(const Transcript& transcript,
                                                 const GroupingOptions& options) {
  const auto k = static_cast<std::size_t>(transcript.num_outcomes());
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  double scale = 1.0;
  if (options.quantize_decimals) scale = std::pow(10.0, *options.quantize_decimals);
  std::vector<double> key(k);
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    const auto p = transcript.prediction(t);
    for (std::size_t i = 0; i < k; ++i) {
      key[i] = options.quantize_decimals ? std::round(p[i] * scale) / scale : p[i];
    }
    auto [it, inserted] = groups.try_emplace(key, k, 0);
    ++it->second[static_cast<std::size_t>(transcript.outcome(t))];
  }
  std::vector<PredictionGroup> out;
  out.reserve(groups.size());
  for (auto& [point, counts] : groups) {
    PredictionGroup g;
    g.point = point;
    g.outcome_counts = counts;
    for (auto c : counts) g.rounds += c;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace ucal
