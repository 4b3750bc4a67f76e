#pragma once

#include <span>
#include <string>
#include <vector>

namespace ucal {

// Agent utility u(a, x) over a finite action set and K outcomes.
class UtilityMatrix {
 public:
  // Entries must lie in [-1, 1].
  explicit UtilityMatrix(std::vector<std::vector<double>> table, std::vector<std::string> labels = {});
  // Skips the [-1, 1] check, for utilities the caller rescales later.
  static UtilityMatrix unbounded(std::vector<std::vector<double>> table,
                                 std::vector<std::string> labels = {});

  int num_actions() const { return static_cast<int>(table_.size()); }
  int num_outcomes() const { return static_cast<int>(table_.front().size()); }
  double operator()(int action, int outcome) const {
    return table_[static_cast<std::size_t>(action)][static_cast<std::size_t>(outcome)];
  }
  const std::vector<double>& row(int action) const { return table_[static_cast<std::size_t>(action)]; }
  const std::vector<std::vector<double>>& table() const { return table_; }
  const std::string& label(int action) const { return labels_[static_cast<std::size_t>(action)]; }
  bool is_bounded() const;
  double max_abs() const;

  // Sum_x p_x u(a, x).
  double expected(int action, std::span<const double> p) const;
  UtilityMatrix scaled(double factor) const;

 private:
  UtilityMatrix(std::vector<std::vector<double>> table, std::vector<std::string> labels, bool check);

  std::vector<std::vector<double>> table_;
  std::vector<std::string> labels_;
};

}  // namespace ucal
