// One PASS/FAIL line per acceptance criterion. `--mint` recomputes the frozen
// Hedge reference values through the oracle and prints them; `--only N` runs a
// single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "support/random.hpp"
#include "ucal/agents.hpp"
#include "ucal/fixtures.hpp"
#include "ucal/forecasters.hpp"
#include "ucal/metrics.hpp"
#include "ucal/oracle.hpp"
#include "ucal/summation.hpp"
#include "ucal/ucal_lp.hpp"

namespace {

using namespace ucal;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failures; the first few go into the detail line.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_.push_back(what);
  }
  Outcome outcome(const std::string& summary) const {
    std::string detail = fmt::format("{}; {} checks, {} failed", summary, checks_, failures_);
    for (const auto& n : notes_) detail += "; " + n;
    return {failures_ == 0, detail};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Fixture exactness, each fixture timed against its own 1 s budget.
Outcome criterion_1() {
  Tally tally;
  auto timed = [&](const std::string& name, const std::function<void()>& body) {
    const auto start = Clock::now();
    body();
    const double s = seconds_since(start);
    tally.check(s < 1.0, fmt::format("{} took {:.3f} s", name, s));
  };
  timed("low_brier", [&] {
    const auto f = fixtures::gen_low_brier(1000);
    const double r = reg(BivariateRule::brier(), f.transcript);
    const double a = agent_reg(f.agent, f.transcript);
    tally.check(near(r, -50.0, 1e-9), fmt::format("Reg_Brier = {}", r));
    tally.check(near(a, 100.0, 1e-9), fmt::format("AgentReg = {}", a));
  });
  timed("ex1", [&] {
    const double v = vcal(fixtures::gen_halves_example(fixtures::HalvesExample::kEx1, 1000)).value;
    tally.check(near(v, 250.0, 1e-9), fmt::format("ex1 VCal = {}", v));
  });
  timed("ex2", [&] {
    const auto t = fixtures::gen_halves_example(fixtures::HalvesExample::kEx2, 1000);
    const double v = vcal(t).value, c = cal_l1(t);
    tally.check(near(v, 0.0, 1e-9), fmt::format("ex2 VCal = {}", v));
    tally.check(near(c, 0.0, 1e-9), fmt::format("ex2 Cal = {}", c));
  });
  timed("epoch", [&] {
    const auto f = fixtures::gen_multiclass_epoch_example(900);
    for (int i = 0; i < 3; ++i) {
      const double c = cal_l1(f.transcript.one_vs_all(i));
      tally.check(near(c, 0.0, 1e-9), fmt::format("epoch Cal_{} = {}", i, c));
    }
    const double a = agent_reg(f.raw_agent, f.transcript);
    tally.check(near(a, 300.0, 1e-9), fmt::format("epoch AgentReg = {}", a));
  });
  return tally.outcome("low_brier, ex1, ex2, epoch");
}

Outcome criterion_2() {
  Tally tally;
  CounterRng rng(2002);
  double worst_vreg = 0.0, worst_vcal = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto t = testing::random_binary_transcript(rng, 50);
    const double v = rng.uniform() < 0.25 ? t.binary_prediction(rng.uniform_int(49)) : rng.uniform();
    const double d = std::abs(vreg(v, t) - oracle::vreg_naive(v, t));
    worst_vreg = std::max(worst_vreg, d);
    tally.check(d <= 1e-12, fmt::format("vreg differs by {:.3g} at v = {}", d, v));
  }
  for (int i = 0; i < 100; ++i) {
    const auto t = testing::random_binary_transcript(rng, 40);
    const double d = std::abs(vcal(t).value - oracle::vcal_grid(t));
    worst_vcal = std::max(worst_vcal, d);
    tally.check(d <= 1e-9, fmt::format("vcal differs by {:.3g}", d));
  }
  return tally.outcome(fmt::format("max |vreg - naive| = {:.3g}, max |vcal - grid| = {:.3g}", worst_vreg, worst_vcal));
}

Outcome criterion_3() {
  Tally tally;
  CounterRng rng(3003);
  double tightest = 1e300;
  for (int i = 0; i < 100; ++i) {
    const auto t = testing::random_binary_transcript(rng, 50);
    const auto lp = max_agent_reg(t);
    tally.check(lp.status == SimplexStatus::kOptimal, fmt::format("LP status {}", to_string(lp.status)));
    const double v = vcal(t).value;
    tally.check(0.5 * lp.value - 1e-9 <= v, fmt::format("VCal {} < MaxAgentReg/2 = {}", v, 0.5 * lp.value));
    tally.check(v <= lp.value + 1e-9, fmt::format("VCal {} > MaxAgentReg {}", v, lp.value));
    tightest = std::min({tightest, v - 0.5 * lp.value, lp.value - v});
  }
  return tally.outcome(fmt::format("smallest slack {:.3g}", tightest));
}

Outcome criterion_4() {
  Tally tally;
  CounterRng rng(4004);
  for (int i = 0; i < 200; ++i) {
    const auto t = testing::random_binary_transcript(rng, 1 + rng.uniform_int(99));
    const auto u = testing::random_utility(rng, 2);
    const double c = cal_l1(t);
    const double r = agent_reg(u, t), s = agent_swap_reg(u, t);
    tally.check(r <= 4 * c + 1e-9, fmt::format("AgentReg {} > 4 Cal {}", r, 4 * c));
    tally.check(s <= 4 * c + 1e-9, fmt::format("AgentSwapReg {} > 4 Cal {}", s, 4 * c));
  }
  for (int i = 0; i < 200; ++i) {
    const int k = 3 + static_cast<int>(rng.uniform_int(2));
    const auto t = testing::random_multiclass_transcript(rng, k, 1 + rng.uniform_int(99));
    const auto u = testing::random_utility(rng, k);
    const double c = cal_l1_multiclass(t), r = agent_reg(u, t);
    tally.check(r <= 2 * c + 1e-9, fmt::format("K = {}: AgentReg {} > 2 Cal {}", k, r, 2 * c));
  }
  return tally.outcome("200 binary and 200 multiclass pairs");
}

Outcome criterion_5() {
  Tally tally;
  CounterRng rng(5005);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto t = testing::random_binary_transcript(rng, 1 + rng.uniform_int(99));
    const double c2 = cal_l2(t);
    const double d = std::abs(agent_swap_reg(squared_loss_agent(t), t) - c2);
    worst = std::max(worst, d);
    tally.check(d <= 1e-9, fmt::format("swap identity off by {:.3g}", d));
    const double n = static_cast<double>(t.size()), c1 = cal_l1(t) / n;
    tally.check(c1 * c1 <= c2 / n + 1e-12, "(Cal/T)^2 > Cal2/T");
    tally.check(c2 / n <= c1 + 1e-12, "Cal2/T > Cal/T");
  }
  return tally.outcome(fmt::format("max |AgentSwapReg - Cal2| = {:.3g}", worst));
}

Outcome criterion_6() {
  Tally tally;
  CounterRng rng(6006);
  double worst = 0.0, largest = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto rule = testing::random_bounded_pl(rng);
    const auto t = testing::random_binary_transcript(rng, 50);
    const auto d = v_decompose(rule);
    largest = std::max(largest, d.weight_sum());
    tally.check(d.weight_sum() <= 2.0 + 1e-12, fmt::format("lambda sum {}", d.weight_sum()));
    CompensatedSum mixed;
    for (std::size_t j = 0; j < d.centers.size(); ++j) mixed += d.weights[j] * vreg(d.centers[j], t);
    const double gap = std::abs(reg(bivariate_from_univariate(rule), t) - mixed.value());
    worst = std::max(worst, gap);
    tally.check(gap <= 1e-9, fmt::format("decomposition off by {:.3g}", gap));
  }
  return tally.outcome(fmt::format("max lambda sum {:.6f}, max residual {:.3g}", largest, worst));
}

const std::vector<std::string> kHedgeSequences{"half_ones", "alternating", "all_ones"};
constexpr std::uint64_t kHedgeSeeds = 50;

// Mean VCal / sqrt(T) at T = 256 over seeds 0..49, minted with oracle::vcal_grid
// (see --mint) and frozen here.
const std::map<std::string, double> kHedgeReference{
    {"half_ones", 1.3003677152706286},
    {"alternating", 1.2591555196979731},
    {"all_ones", 0.90657436730997687},
};

double hedge_mean_vcal(const std::string& sequence, std::size_t rounds, bool use_oracle) {
  const auto spec = parse_forecaster("hedge");
  const auto xs = oblivious_pattern(sequence, rounds, 2);
  CompensatedSum total;
  for (std::uint64_t seed = 0; seed < kHedgeSeeds; ++seed) {
    const auto t = run_forecaster(spec, xs, rounds, seed);
    total += use_oracle ? oracle::vcal_grid(t) : vcal(t).value;
  }
  return total.value() / static_cast<double>(kHedgeSeeds);
}

Outcome criterion_7() {
  Tally tally;
  const std::vector<std::size_t> horizons{256, 1024, 4096};
  std::string summary;
  for (const auto& seq : kHedgeSequences) {
    std::vector<double> lx, ly;
    double at_4096 = 0.0;
    for (std::size_t n : horizons) {
      const double mean = hedge_mean_vcal(seq, n, false);
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(mean));
      if (n == 4096) at_4096 = mean / std::sqrt(static_cast<double>(n));
    }
    const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    const double ref = kHedgeReference.at(seq);
    tally.check(std::isfinite(slope) && slope <= 0.6, fmt::format("{} slope {:.3f}", seq, slope));
    tally.check(at_4096 <= 1.5 * ref, fmt::format("{} VCal/sqrt(T) {:.4f} > 1.5 x {:.4f}", seq, at_4096, ref));
    summary += fmt::format("{}{}: slope {:.3f}, VCal/sqrt(T) {:.4f} vs ref {:.4f}", summary.empty() ? "" : "; ",
                           seq, slope, at_4096, ref);
  }
  return tally.outcome(summary);
}

BivariateRule separable_vshape(int k, double v) {
  return BivariateRule::separable(std::vector<PLScoringRule>(static_cast<std::size_t>(k), PLScoringRule::vshape(v)))
      .renamed(fmt::format("sep_vshape_{}", v));
}

Outcome criterion_8() {
  Tally tally;
  constexpr std::size_t kRounds = 2500;
  const std::vector<std::string> sequences{"cyclic", "blocks:500"};
  double worst_ratio = -1e300;
  std::string worst;
  for (int k : {2, 3, 5}) {
    std::vector<BivariateRule> rules{BivariateRule::brier(k)};
    for (int i = 1; i <= 9; ++i) rules.push_back(separable_vshape(k, i / 10.0));
    const auto spec = parse_forecaster("ftpl", k);
    const double bound = 7.0 * k * std::sqrt(static_cast<double>(kRounds));
    for (const auto& seq : sequences) {
      std::vector<CompensatedSum> totals(rules.size());
      const auto xs = oblivious_pattern(seq, kRounds, k);
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto t = run_forecaster(spec, xs, kRounds, seed);
        for (std::size_t r = 0; r < rules.size(); ++r) totals[r] += reg(rules[r], t);
      }
      for (std::size_t r = 0; r < rules.size(); ++r) {
        const double mean = totals[r].value() / 50.0;
        tally.check(mean <= bound, fmt::format("K = {} {} {}: mean Reg {:.2f} > {:.1f}", k, seq, rules[r].name(), mean,
                                               bound));
        if (mean / bound > worst_ratio) {
          worst_ratio = mean / bound;
          worst = fmt::format("K = {} {} {} mean Reg {:.2f} vs {:.1f}", k, seq, rules[r].name(), mean, bound);
        }
      }
    }
  }
  return tally.outcome("largest " + worst);
}

Outcome criterion_9() {
  Tally tally;
  CounterRng rng(9009);
  auto check_lp = [&](const Transcript& t, const std::string& label) {
    const auto sol = max_agent_reg(t);
    tally.check(sol.status == SimplexStatus::kOptimal, label + " not optimal");
    const auto violation = membership_check(sol.table);
    tally.check(!violation, label + " fails membership");
    const double gap = std::abs(reg(extract_witness(sol), t) - sol.value);
    tally.check(gap <= 1e-9 * static_cast<double>(t.size()), fmt::format("{} witness off by {:.3g}", label, gap));
    return sol.value;
  };
  for (int i = 0; i < 40; ++i) check_lp(testing::random_binary_transcript(rng, 50), "binary");
  for (int i = 0; i < 10; ++i) check_lp(testing::random_multiclass_transcript(rng, 3, 30), "multiclass");
  check_lp(fixtures::gen_multiclass_epoch_example(90).transcript, "epoch");
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t distinct = 1 + rng.uniform_int(2);
    std::vector<double> values;
    for (std::size_t j = 0; j < distinct; ++j) values.push_back(static_cast<double>(rng.uniform_int(10)) / 10.0);
    const std::size_t n = 2 + rng.uniform_int(10);
    std::vector<int> xs(n);
    std::vector<double> ps(n);
    for (std::size_t j = 0; j < n; ++j) {
      ps[j] = values[rng.uniform_int(distinct - 1)];
      xs[j] = static_cast<int>(rng.uniform_int(1));
    }
    const auto t = Transcript::binary(std::move(xs), ps);
    const double lp = check_lp(t, "tiny");
    const double vertex = oracle::max_agent_reg_vertex(t);
    worst = std::max(worst, std::abs(lp - vertex));
    tally.check(near(lp, vertex, 1e-9), fmt::format("LP {} vs vertex {}", lp, vertex));
  }
  return tally.outcome(fmt::format("51 LP optima, 20 vertex comparisons, max |LP - vertex| = {:.3g}", worst));
}

Outcome criterion_10() {
  Tally tally;
  constexpr std::size_t kRounds = 100000;
  const double n = static_cast<double>(kRounds);
  const auto t = fixtures::gen_halves_example(fixtures::HalvesExample::kEx3, kRounds);
  const double v = std::abs(vcal(t).value) / n;
  const double c = cal_l1(t);
  const double spike = std::abs(weak_cal_witness(t, spike_witness));
  tally.check(v <= 0.02, fmt::format("|VCal|/T = {:.3g}", v));
  tally.check(c >= 0.5 * n, fmt::format("Cal = {:.3f} = {:.4f} T, below 0.5 T", c, c / n));
  tally.check(spike >= 0.005, fmt::format("spike witness {:.5f}", spike));
  return tally.outcome(fmt::format("|VCal|/T = {:.3g}, Cal/T = {:.4f}, spike = {:.5f}", v, c / n, spike));
}

Outcome adaptive_demo() {
  Tally tally;
  constexpr std::size_t kRounds = 10000;
  ThresholdAdversary adversary(0.5);
  const auto t = run_adaptive_demo(parse_forecaster("empirical"), adversary, kRounds, 0);
  const double v = vcal(t).value / static_cast<double>(kRounds);
  tally.check(v > 0.2, fmt::format("VCal/T = {:.4f}", v));
  return tally.outcome(fmt::format("empirical average vs threshold adversary, VCal/T = {:.4f}", v));
}

int mint() {
  std::printf("T = 256 mean VCal / sqrt(T) over seeds 0..%llu, oracle grid and closed form:\n",
              static_cast<unsigned long long>(kHedgeSeeds - 1));
  for (const auto& seq : kHedgeSequences) {
    const double oracle_value = hedge_mean_vcal(seq, 256, true) / 16.0;
    const double fast_value = hedge_mean_vcal(seq, 256, false) / 16.0;
    std::printf("  %-12s %.17g  %.17g\n", seq.c_str(), oracle_value, fast_value);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--mint") == 0) return mint();
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
  }
  const std::vector<Criterion> criteria{
      {"1", "fixture exactness", 4.0, criterion_1},
      {"2", "closed form vs brute force", 10.0, criterion_2},
      {"3", "VCal sandwich", 60.0, criterion_3},
      {"4", "calibration bounds on agent regret", 60.0, criterion_4},
      {"5", "squared-loss swap identity", 60.0, criterion_5},
      {"6", "V-shape decomposition", 60.0, criterion_6},
      {"7", "ForecastHedge VCal rate", 300.0, criterion_7},
      {"8", "ForecastFTPL regret bound", 300.0, criterion_8},
      {"9", "LP witness integrity", 120.0, criterion_9},
      {"10", "harmonic example asymptotics", 30.0, criterion_10},
      {"demo", "adaptive adversary vs deterministic forecaster", 60.0, adaptive_demo},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.id != only) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = seconds_since(start);
    if (s > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s budget", c.budget_seconds);
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s [%s] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
