#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ucal {

// Paired predictions and realized outcomes. Outcomes are 0-based labels in
// [0, K); predictions are points of the K-simplex stored row-major. A binary
// transcript (K = 2) stores the row (1 - p, p), where p is the probability of
// outcome 1, and exposes p directly through binary_prediction().
class Transcript {
 public:
  static constexpr double kSimplexTolerance = 1e-12;

  static Transcript binary(std::vector<int> outcomes, const std::vector<double>& predictions);
  static Transcript multiclass(int num_outcomes, std::vector<int> outcomes,
                               const std::vector<std::vector<double>>& predictions);

  int num_outcomes() const { return num_outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  bool is_binary() const { return num_outcomes_ == 2; }

  int outcome(std::size_t t) const { return outcomes_[t]; }
  std::span<const int> outcomes() const { return outcomes_; }
  std::span<const double> prediction(std::size_t t) const {
    return {predictions_.data() + t * static_cast<std::size_t>(num_outcomes_),
            static_cast<std::size_t>(num_outcomes_)};
  }
  double binary_prediction(std::size_t t) const { return predictions_[2 * t + 1]; }
  std::vector<double> binary_predictions() const;

  // Empirical outcome frequencies (the base rate beta as a simplex point).
  std::vector<double> base_rate() const;
  double binary_base_rate() const;
  std::vector<std::size_t> outcome_counts() const;

  // Binary reduction "is the outcome i?" with predictions p_t[i].
  Transcript one_vs_all(int outcome) const;

  // Same rounds in a different order: perm[i] is the source index of round i.
  Transcript permuted(std::span<const std::size_t> perm) const;

  bool operator==(const Transcript&) const = default;

 private:
  Transcript(int num_outcomes, std::vector<int> outcomes, std::vector<double> predictions);

  int num_outcomes_ = 2;
  std::vector<int> outcomes_;
  std::vector<double> predictions_;
};

void require_binary(const Transcript& transcript, const char* operation);

// Rounds sharing one prediction value. Grouping is by exact bit equality
// unless a quantization is requested.
struct PredictionGroup {
  std::vector<double> point;
  std::vector<std::size_t> outcome_counts;
  std::size_t rounds = 0;
};

struct GroupingOptions {
  // Round every coordinate to this many decimal places before grouping.
  std::optional<int> quantize_decimals;
};

// Groups sorted lexicographically by prediction point.
std::vector<PredictionGroup> group_by_prediction(const Transcript& transcript,
                                                 const GroupingOptions& options = {});

}  // namespace ucal
