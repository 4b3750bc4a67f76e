#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucal/scoring.hpp"
#include "ucal/transcript.hpp"
#include "ucal/utility.hpp"

namespace ucal {

struct ReportMetadata {
  std::size_t rounds = 0;
  int num_outcomes = 2;
  std::optional<std::uint64_t> seed;
  std::string forecaster;
};

// Named metric values in insertion order.
class RegretReport {
 public:
  explicit RegretReport(ReportMetadata metadata) : metadata_(std::move(metadata)) {}

  // Replaces an existing entry in place.
  void set(const std::string& name, double value);
  std::optional<double> get(const std::string& name) const;
  double at(const std::string& name) const;
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  const ReportMetadata& metadata() const { return metadata_; }
  ReportMetadata& metadata() { return metadata_; }

  nlohmann::ordered_json to_json() const;
  // Columns: T, K, seed, forecaster, then metrics in insertion order.
  std::string csv_header() const;
  std::string csv_row() const;

 private:
  ReportMetadata metadata_;
  std::vector<std::pair<std::string, double>> entries_;
};

struct ReportOptions {
  std::vector<BivariateRule> rules;
  std::optional<UtilityMatrix> agent;
  bool include_lp = false;
  double lp_epsilon = 1e-10;
};

// Binary: reg per rule, cal, cal2, vcal and its witness, optional LP value.
// Multiclass: reg per rule, cal (l1 over coordinates), optional LP value.
RegretReport evaluate_transcript(const Transcript& transcript, const ReportOptions& options,
                                 ReportMetadata metadata = {});

}  // namespace ucal
