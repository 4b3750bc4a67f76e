#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ucal/error.hpp"
#include "ucal/fixtures.hpp"
#include "ucal/forecasters.hpp"
#include "ucal/io.hpp"
#include "ucal/metrics.hpp"
#include "ucal/oracle.hpp"
#include "ucal/report.hpp"
#include "ucal/ucal_lp.hpp"

namespace ucal::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

struct Common {
  int jobs = 1;
  std::string config;
  bool oracle = false;
};

struct SimulateArgs {
  std::string forecaster = "hedge";
  std::string adversary = "pattern=half_ones";
  std::size_t rounds = 1024;
  int outcomes = 2;
  std::string seeds = "0";
  std::string out = ".";
  std::optional<double> eta;
  bool adaptive_demo = false;
};

struct MetricsArgs {
  std::string transcript;
  std::string rules;
  std::string agent;
  bool all = false;
  std::string format = "json";
};

struct UcalArgs {
  std::string transcript;
  std::string method = "both";
  double epsilon = 1e-10;
  std::size_t max_anchors = 2000;
  std::string dump_lp;
};

struct ExampleArgs {
  std::string name;
  std::optional<std::size_t> rounds;
  std::string out = ".";
  bool list = false;
};

const std::vector<std::string> kSubcommands = {"simulate", "metrics", "ucal", "example"};

void configure_logging() {
  const char* env = std::getenv("UCAL_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

std::string json_scalar_to_arg(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Turns a JSON config into flags placed ahead of the user's own, so that with
// take-last semantics the command line wins.
void append_config_flags(const json& obj, std::vector<std::string>& into) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) into.push_back(flag);
    } else {
      into.push_back(flag);
      into.push_back(json_scalar_to_arg(value));
    }
  }
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].starts_with("--config=")) config_path = args[i].substr(9);
  }
  if (!config_path) return args;
  const json config = io::read_json_file(*config_path);
  if (!config.is_object()) throw ValidationError("config file must hold a JSON object");

  const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  std::vector<std::string> merged;
  append_config_flags(config, merged);
  merged.insert(merged.end(), args.begin(), sub_it);
  if (sub_it != args.end()) {
    merged.push_back(*sub_it);
    if (config.contains(*sub_it) && config.at(*sub_it).is_object()) append_config_flags(config.at(*sub_it), merged);
    merged.insert(merged.end(), sub_it + 1, args.end());
  }
  return merged;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  auto parse = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("bad seed range '{}', expected a or a..b", text));
    }
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto s = parse(text);
    return {s, s};
  }
  const auto lo = parse(text.substr(0, dots));
  const auto hi = parse(text.substr(dots + 2));
  if (hi < lo) throw ValidationError(fmt::format("empty seed range '{}'", text));
  return {lo, hi};
}

std::vector<int> outcomes_from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read adversary file '{}'", path.string()));
  std::string first;
  std::getline(in, first);
  if (first.starts_with("t,x")) {
    in.clear();
    in.seekg(0);
    const Transcript t = io::read_transcript_csv(in);
    return {t.outcomes().begin(), t.outcomes().end()};
  }
  std::vector<int> xs;
  std::string line = first;
  do {
    if (line.empty() || line == "\r") continue;
    try {
      xs.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("adversary file line '{}' is not an outcome", line));
    }
  } while (std::getline(in, line));
  return xs;
}

// Per-outcome V-shaped rules for multiclass transcripts.
BivariateRule separable_vshape(int k, double v) {
  std::vector<PLScoringRule> parts(static_cast<std::size_t>(k), PLScoringRule::vshape(v));
  return BivariateRule::separable(std::move(parts)).renamed(fmt::format("sep_vshape({})", v));
}

std::vector<BivariateRule> simulation_rules(const ForecasterSpec& spec) {
  std::vector<BivariateRule> rules{BivariateRule::brier(spec.num_outcomes)};
  if (spec.kind == ForecasterKind::kFtpl) {
    for (int i = 1; i <= 9; ++i) {
      const double v = i / 10.0;
      rules.push_back(spec.num_outcomes == 2 ? BivariateRule::vshape(v) : separable_vshape(spec.num_outcomes, v));
    }
  }
  return rules;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, 256));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int run_simulate(const Common& common, const SimulateArgs& a, std::ostream& out) {
  const ForecasterSpec spec = parse_forecaster(a.forecaster, a.outcomes);
  ForecasterSpec with_eta = spec;
  with_eta.eta = a.eta;
  const auto [lo, hi] = parse_seed_range(a.seeds);
  const bool adaptive = a.adversary == "adaptive" || a.adversary.starts_with("adaptive:");
  if (adaptive && !a.adaptive_demo) {
    throw ValidationError("adaptive adversaries need --adaptive-demo; the forecasters' guarantees assume oblivious outcomes");
  }
  std::optional<std::vector<int>> fixed;
  std::string pattern;
  if (a.adversary.starts_with("file=")) {
    fixed = outcomes_from_file(a.adversary.substr(5));
  } else if (a.adversary.starts_with("pattern=")) {
    pattern = a.adversary.substr(8);
  } else if (!adaptive) {
    throw ValidationError(fmt::format("unknown adversary '{}', expected pattern=<name>, file=<path> or adaptive",
                                      a.adversary));
  }
  const std::size_t rounds = fixed ? fixed->size() : a.rounds;
  if (fixed && a.rounds != fixed->size()) {
    spdlog::info("adversary file fixes T = {}", fixed->size());
  }
  const fs::path dir(a.out);
  fs::create_directories(dir);

  const std::size_t n = static_cast<std::size_t>(hi - lo) + 1;
  std::vector<std::optional<RegretReport>> reports(n);
  ReportOptions options;
  options.rules = simulation_rules(spec);
  parallel_for(n, common.jobs, [&](std::size_t i) {
    const std::uint64_t seed = lo + i;
    Transcript transcript = Transcript::binary({0}, {0.0});
    if (adaptive) {
      double threshold = 0.5;
      if (a.adversary.starts_with("adaptive:")) threshold = std::stod(a.adversary.substr(9));
      ThresholdAdversary adversary(threshold);
      transcript = run_adaptive_demo(with_eta, adversary, rounds, seed);
    } else {
      const auto outcomes = fixed ? *fixed : oblivious_pattern(pattern, rounds, a.outcomes, seed);
      transcript = run_forecaster(with_eta, outcomes, rounds, seed);
    }
    io::save_transcript(dir / fmt::format("transcript_seed{}.csv", seed), transcript);
    RegretReport report = evaluate_transcript(transcript, options, {rounds, a.outcomes, seed, spec.id()});
    if (common.oracle && transcript.is_binary()) report.set("vcal_grid", oracle::vcal_grid(transcript));
    spdlog::debug("seed {} done", seed);
    reports[i] = std::move(report);
  });

  std::string csv = reports.front()->csv_header() + "\n";
  for (const auto& r : reports) csv += r->csv_row() + "\n";
  io::write_text_file(dir / "report.csv", csv);
  out << fmt::format("wrote {} transcript(s) and {}\n", n, (dir / "report.csv").string());
  return kExitOk;
}

json load_json_argument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError(fmt::format("inline JSON is malformed: {}", e.what()));
    }
  }
  return io::read_json_file(text);
}

std::optional<double> vertex_oracle_if_small(const Transcript& t) {
  if (!t.is_binary()) return std::nullopt;
  std::set<double> distinct;
  for (std::size_t i = 0; i < t.size(); ++i) distinct.insert(t.binary_prediction(i));
  if (distinct.size() > 3) return std::nullopt;
  return oracle::max_agent_reg_vertex(t);
}

int run_metrics(const Common& common, const MetricsArgs& a, std::ostream& out) {
  const Transcript transcript = io::load_transcript(a.transcript);
  ReportOptions options;
  if (a.rules.empty()) {
    options.rules.push_back(BivariateRule::brier(transcript.num_outcomes()));
  } else {
    json rules = load_json_argument(a.rules);
    if (!rules.is_array()) rules = json::array({rules});
    for (const auto& r : rules) options.rules.push_back(io::rule_from_json(r).rule);
  }
  if (!a.agent.empty()) options.agent = io::utility_from_json(load_json_argument(a.agent));
  options.include_lp = a.all;
  RegretReport report = evaluate_transcript(transcript, options, {transcript.size(), transcript.num_outcomes(), {}, ""});
  if (common.oracle) {
    if (transcript.is_binary()) report.set("vcal_grid", oracle::vcal_grid(transcript));
    if (a.all) {
      if (auto v = vertex_oracle_if_small(transcript)) report.set("max_agent_reg_vertex", *v);
    }
  }
  if (a.format == "csv") {
    out << report.csv_header() << "\n" << report.csv_row() << "\n";
  } else {
    ordered_json j = report.to_json();
    if (transcript.is_binary()) j["vcal_side"] = std::string(to_string(vcal(transcript).side));
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

int run_ucal(const Common& common, const UcalArgs& a, std::ostream& out) {
  const Transcript transcript = io::load_transcript(a.transcript);
  const bool want_lp = a.method == "lp" || a.method == "both";
  const bool want_vcal = a.method == "vcal" || a.method == "both";
  if (!want_lp && !want_vcal) throw ValidationError(fmt::format("unknown method '{}'", a.method));
  if (want_vcal && !transcript.is_binary()) throw ValidationError("vcal is defined for binary transcripts only");

  ordered_json j;
  int code = kExitOk;
  std::optional<double> lp_value;
  if (!a.dump_lp.empty()) io::write_text_file(a.dump_lp, dump_lp(build_ucal_instance(transcript)));
  if (want_lp) {
    MaxAgentRegOptions options;
    options.epsilon = a.epsilon;
    options.max_anchors = a.max_anchors;
    const LPSolution sol = max_agent_reg(transcript, options);
    ordered_json lp;
    lp["status"] = std::string(to_string(sol.status));
    lp["value"] = sol.value;
    lp["bound"] = sol.bound;
    lp["iterations"] = sol.iterations;
    lp["membership_ok"] = !membership_check(sol.table).has_value();
    lp["witness_reg"] = reg(extract_witness(sol), transcript);
    lp["witness"] = io::score_table_to_json(sol.table);
    j["lp"] = lp;
    if (sol.status != SimplexStatus::kOptimal) {
      spdlog::error("LP solver stopped with status {}", to_string(sol.status));
      code = kExitSolver;
    } else {
      lp_value = sol.value;
    }
  }
  if (want_vcal) {
    const VCalResult v = vcal(transcript);
    ordered_json vj;
    vj["value"] = v.value;
    vj["v"] = v.witness;
    vj["side"] = std::string(to_string(v.side));
    vj["rule"] = io::vshape_to_json(v.witness);
    j["vcal"] = vj;
    if (lp_value) {
      const double tol = 1e-9;
      const bool ok = 0.5 * *lp_value - tol <= v.value && v.value <= *lp_value + tol;
      j["sandwich"] = {{"half_lp", 0.5 * *lp_value}, {"vcal", v.value}, {"lp", *lp_value}, {"ok", ok}};
      if (!ok && code == kExitOk) code = kExitMismatch;
    }
  }
  if (common.oracle) {
    ordered_json o;
    if (transcript.is_binary()) o["vcal_grid"] = oracle::vcal_grid(transcript);
    if (auto v = vertex_oracle_if_small(transcript)) o["max_agent_reg_vertex"] = *v;
    j["oracle"] = o;
  }
  out << j.dump(2) << "\n";
  return code;
}

std::size_t default_rounds(const std::string& name) {
  if (name == "ex3") return 100000;
  if (name == "epoch") return 900;
  return 1000;
}

int run_example(const ExampleArgs& a, std::ostream& out) {
  if (a.list) {
    for (const auto& n : fixtures::fixture_names()) out << n << "\n";
    return kExitOk;
  }
  if (a.name.empty()) throw ValidationError("--name is required (see --list)");
  const std::size_t rounds = a.rounds.value_or(default_rounds(a.name));
  const fixtures::Fixture f = fixtures::make_fixture(a.name, rounds);
  const auto results = fixtures::check_fixture(f);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::save_transcript(dir / (a.name + ".csv"), f.transcript);

  ordered_json side;
  side["name"] = f.name;
  side["T"] = f.rounds;
  side["K"] = f.transcript.num_outcomes();
  if (f.agent) side["agent"] = io::utility_to_json(*f.agent);
  if (f.normalized_agent) side["normalized_agent"] = io::utility_to_json(*f.normalized_agent);
  bool all = true;
  auto& list = side["expectations"];
  list = ordered_json::array();
  for (const auto& r : results) {
    ordered_json e;
    e["metric"] = r.expectation.metric;
    e["relation"] = std::string(fixtures::to_string(r.expectation.relation));
    e["expected"] = r.expectation.value;
    e["tolerance"] = r.expectation.tolerance;
    e["actual"] = r.actual;
    e["passed"] = r.passed;
    if (!r.expectation.note.empty()) e["note"] = r.expectation.note;
    list.push_back(e);
    all = all && r.passed;
    out << fmt::format("{} {} {} {:.17g} (actual {:.17g})\n", r.passed ? "ok  " : "FAIL", r.expectation.metric,
                       fixtures::to_string(r.expectation.relation), r.expectation.value, r.actual);
  }
  side["all_passed"] = all;
  io::write_text_file(dir / (a.name + ".expected.json"), side.dump(2) + "\n");
  return all ? kExitOk : kExitMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  Common common;
  SimulateArgs sim;
  MetricsArgs met;
  UcalArgs uc;
  ExampleArgs ex;

  CLI::App app{"U-calibration laboratory: scoring rules, calibration metrics, forecasters and exact LP."};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--jobs", common.jobs, "Worker threads for seed-parallel work")->check(CLI::PositiveNumber);
  app.add_option("--config", common.config, "JSON file mirroring the flags; flags on the command line win");
  app.add_flag("--oracle", common.oracle, "Also report brute-force oracle values");

  auto* simulate = app.add_subcommand("simulate", "Run a forecaster against an outcome source");
  simulate->add_option("--forecaster", sim.forecaster, "hedge | ftpl | empirical | constant[=<v>]");
  simulate->add_option("--adversary", sim.adversary,
                       "pattern=<half_ones|alternating|all_ones|all_zeros|cyclic|bernoulli:<q>|blocks:<len>> | "
                       "file=<path> | adaptive[:<threshold>]");
  simulate->add_option("--T", sim.rounds, "Rounds")->check(CLI::PositiveNumber);
  simulate->add_option("--K", sim.outcomes, "Outcomes")->check(CLI::Range(2, 1000));
  simulate->add_option("--seeds", sim.seeds, "Seed or inclusive range a..b");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--eta", sim.eta, "Hedge learning rate (default 1/sqrt(T))");
  simulate->add_flag("--adaptive-demo", sim.adaptive_demo, "Allow the adaptive threshold adversary");

  auto* metrics = app.add_subcommand("metrics", "Evaluate a transcript");
  metrics->add_option("--transcript", met.transcript, "Transcript CSV")->required();
  metrics->add_option("--rules", met.rules, "Rule JSON list, inline or as a file path");
  metrics->add_option("--agent", met.agent, "Utility JSON, inline or as a file path");
  metrics->add_flag("--all", met.all, "Include the LP U-calibration value");
  metrics->add_option("--format", met.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  auto* ucal = app.add_subcommand("ucal", "U-calibration error by LP and/or V-calibration");
  ucal->add_option("--transcript", uc.transcript, "Transcript CSV")->required();
  ucal->add_option("--method", uc.method, "lp | vcal | both")->check(CLI::IsMember({"lp", "vcal", "both"}));
  ucal->add_option("--epsilon", uc.epsilon, "Reduced-cost tolerance")->check(CLI::PositiveNumber);
  ucal->add_option("--max-anchors", uc.max_anchors, "Cap on distinct predictions");
  ucal->add_option("--dump-lp", uc.dump_lp, "Write the LP in MPS-like text to this path");

  auto* example = app.add_subcommand("example", "Write a worked-example fixture and check its expected values");
  example->add_option("--name", ex.name, "Fixture name");
  example->add_option("--T", ex.rounds, "Rounds")->check(CLI::PositiveNumber);
  example->add_option("--out", ex.out, "Output directory");
  example->add_flag("--list", ex.list, "List fixture names");

  try {
    std::vector<std::string> reversed = merge_config(args);
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
    if (simulate->parsed()) return run_simulate(common, sim, out);
    if (metrics->parsed()) return run_metrics(common, met, out);
    if (ucal->parsed()) return run_ucal(common, uc, out);
    return run_example(ex, out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace ucal::cli
