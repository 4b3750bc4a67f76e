#include "ucal/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "ucal/error.hpp"
#include "ucal/metrics.hpp"
#include "ucal/ucal_lp.hpp"

namespace ucal {

void RegretReport::set(const std::string& name, double value) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
  if (it != entries_.end()) {
    it->second = value;
  } else {
    entries_.emplace_back(name, value);
  }
}

std::optional<double> RegretReport::get(const std::string& name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double RegretReport::at(const std::string& name) const {
  if (auto v = get(name)) return *v;
  throw ValidationError(fmt::format("report has no metric '{}'", name));
}

nlohmann::ordered_json RegretReport::to_json() const {
  nlohmann::ordered_json j;
  j["T"] = metadata_.rounds;
  j["K"] = metadata_.num_outcomes;
  j["seed"] = metadata_.seed ? nlohmann::ordered_json(*metadata_.seed) : nlohmann::ordered_json(nullptr);
  j["forecaster"] = metadata_.forecaster;
  auto& metrics = j["metrics"];
  metrics = nlohmann::ordered_json::object();
  for (const auto& [name, value] : entries_) metrics[name] = value;
  return j;
}

std::string RegretReport::csv_header() const {
  std::string out = "T,K,seed,forecaster";
  for (const auto& e : entries_) out += "," + e.first;
  return out;
}

std::string RegretReport::csv_row() const {
  std::string out = fmt::format("{},{},{},{}", metadata_.rounds, metadata_.num_outcomes,
                                metadata_.seed ? fmt::format("{}", *metadata_.seed) : std::string(),
                                metadata_.forecaster);
  for (const auto& e : entries_) out += fmt::format(",{:.17g}", e.second);
  return out;
}

RegretReport evaluate_transcript(const Transcript& transcript, const ReportOptions& options,
                                 ReportMetadata metadata) {
  metadata.rounds = transcript.size();
  metadata.num_outcomes = transcript.num_outcomes();
  RegretReport report(std::move(metadata));
  for (const auto& rule : options.rules) report.set("reg_" + rule.name(), reg(rule, transcript));
  if (transcript.is_binary()) {
    report.set("cal", cal_l1(transcript));
    report.set("cal2", cal_l2(transcript));
    const VCalResult v = vcal(transcript);
    report.set("vcal", v.value);
    report.set("vcal_v", v.witness);
    report.set("vcal_side", static_cast<double>(static_cast<int>(v.side)));
  } else {
    report.set("cal", cal_l1_multiclass(transcript));
  }
  if (options.agent) {
    report.set("agent_reg", agent_reg(*options.agent, transcript));
    report.set("agent_swap_reg", agent_swap_reg(*options.agent, transcript));
  }
  if (options.include_lp) {
    MaxAgentRegOptions lp;
    lp.epsilon = options.lp_epsilon;
    const LPSolution sol = max_agent_reg(transcript, lp);
    if (sol.status != SimplexStatus::kOptimal) {
      throw SolverError(fmt::format("LP stopped with status {} after {} iterations (bound {:.17g})",
                                    to_string(sol.status), sol.iterations, sol.bound));
    }
    report.set("max_agent_reg", sol.value);
  }
  return report;
}

}  // namespace ucal
