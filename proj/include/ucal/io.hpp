#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ucal/scoring.hpp"
#include "ucal/transcript.hpp"
#include "ucal/ucal_lp.hpp"
#include "ucal/utility.hpp"

namespace ucal::io {

// Header `t,x,p` for K = 2, else `t,x,p_1,...,p_K`; t is 1-based, x is the
// 0-based outcome, numbers use 17 significant digits.
void write_transcript_csv(std::ostream& out, const Transcript& transcript);
Transcript read_transcript_csv(std::istream& in);
void save_transcript(const std::filesystem::path& path, const Transcript& transcript);
Transcript load_transcript(const std::filesystem::path& path);

// A parsed rule, with its piecewise-linear form when it has one.
struct RuleSpec {
  BivariateRule rule;
  std::optional<PLScoringRule> pl;
};

// {"kind": "pl", "breakpoints": [...], "values": [...]} | {"kind": "vshape",
// "v": ...} | {"kind": "brier", "K": optional} | {"kind": "separable",
// "components": [pl...]}.
RuleSpec rule_from_json(const nlohmann::json& j);
nlohmann::json rule_to_json(const PLScoringRule& rule);
nlohmann::json vshape_to_json(double v);
nlohmann::json score_table_to_json(const ScoreTable& table);

// {"u": [[...], ...], "labels": optional}
UtilityMatrix utility_from_json(const nlohmann::json& j);
nlohmann::json utility_to_json(const UtilityMatrix& u);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ucal::io
