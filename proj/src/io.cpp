#include "ucal/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ucal/error.hpp"

namespace ucal::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("line {}: cannot parse {} from '{}'", line_no, what, text));
  }
  return value;
}

}  // namespace

void write_transcript_csv(std::ostream& out, const Transcript& transcript) {
  const int k = transcript.num_outcomes();
  out << "t,x";
  if (k == 2) {
    out << ",p";
  } else {
    for (int i = 1; i <= k; ++i) out << ",p_" << i;
  }
  out << '\n';
  for (std::size_t t = 0; t < transcript.size(); ++t) {
    out << fmt::format("{},{}", t + 1, transcript.outcome(t));
    if (k == 2) {
      out << fmt::format(",{:.17g}", transcript.binary_prediction(t));
    } else {
      for (double p : transcript.prediction(t)) out << fmt::format(",{:.17g}", p);
    }
    out << '\n';
  }
}

Transcript read_transcript_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("transcript CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "x") {
    throw ValidationError("transcript CSV header must start with t,x");
  }
  const bool binary = header.size() == 3 && header[2] == "p";
  const int k = binary ? 2 : static_cast<int>(header.size()) - 2;
  if (!binary) {
    for (int i = 1; i <= k; ++i) {
      if (header[static_cast<std::size_t>(i + 1)] != fmt::format("p_{}", i)) {
        throw ValidationError(fmt::format("transcript CSV column {} should be p_{}", i + 2, i));
      }
    }
  }
  std::vector<int> xs;
  std::vector<double> binary_ps;
  std::vector<std::vector<double>> ps;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError(fmt::format("line {}: expected {} fields, got {}", line_no, header.size(), fields.size()));
    }
    const auto t = parse_field<std::size_t>(fields[0], line_no, "round index");
    if (t != xs.size() + 1) throw ValidationError(fmt::format("line {}: round index {} out of sequence", line_no, t));
    xs.push_back(parse_field<int>(fields[1], line_no, "outcome"));
    if (binary) {
      binary_ps.push_back(parse_field<double>(fields[2], line_no, "prediction"));
    } else {
      std::vector<double> p;
      for (std::size_t i = 2; i < fields.size(); ++i) p.push_back(parse_field<double>(fields[i], line_no, "prediction"));
      ps.push_back(std::move(p));
    }
  }
  if (binary) return Transcript::binary(std::move(xs), binary_ps);
  return Transcript::multiclass(k, std::move(xs), ps);
}

void save_transcript(const std::filesystem::path& path, const Transcript& transcript) {
  std::ofstream out(path);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  write_transcript_csv(out, transcript);
  if (!out) throw ValidationError(fmt::format("failed writing '{}'", path.string()));
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  return read_transcript_csv(in);
}

RuleSpec rule_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "brier") {
      const int k = j.value("K", 2);
      return {BivariateRule::brier(k), std::nullopt};
    }
    if (kind == "vshape") {
      const double v = j.at("v").get<double>();
      return {BivariateRule::vshape(v), PLScoringRule::vshape(v)};
    }
    if (kind == "pl") {
      PLScoringRule pl(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
      return {BivariateRule::from_pl(pl), pl};
    }
    if (kind == "separable") {
      std::vector<PLScoringRule> parts;
      for (const auto& c : j.at("components")) {
        auto spec = rule_from_json(c);
        if (!spec.pl) throw ValidationError("separable components must be pl or vshape rules");
        parts.push_back(*spec.pl);
      }
      return {BivariateRule::separable(std::move(parts)), std::nullopt};
    }
    throw ValidationError(fmt::format("unknown rule kind '{}'", kind));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed rule JSON: {}", e.what()));
  }
}

nlohmann::json rule_to_json(const PLScoringRule& rule) {
  return {{"kind", "pl"}, {"breakpoints", rule.breakpoints()}, {"values", rule.values()}};
}

nlohmann::json vshape_to_json(double v) { return {{"kind", "vshape"}, {"v", v}}; }

nlohmann::json score_table_to_json(const ScoreTable& table) {
  return {{"kind", "table"},
          {"K", table.num_outcomes},
          {"anchors", table.anchors},
          {"y", table.y},
          {"base_anchor", table.base_anchor},
          {"base_merged", table.base_merged}};
}

UtilityMatrix utility_from_json(const nlohmann::json& j) {
  try {
    auto table = j.at("u").get<std::vector<std::vector<double>>>();
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return UtilityMatrix(std::move(table), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed utility JSON: {}", e.what()));
  }
}

nlohmann::json utility_to_json(const UtilityMatrix& u) {
  std::vector<std::string> labels;
  for (int a = 0; a < u.num_actions(); ++a) labels.push_back(u.label(a));
  return {{"u", u.table()}, {"labels", labels}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw ValidationError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace ucal::io
