#include "ucal/forecasters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "ucal/error.hpp"

namespace ucal {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("cannot parse {} from '{}'", what, text));
  }
  return value;
}

std::vector<double> uniform_point(int k) { return std::vector<double>(static_cast<std::size_t>(k), 1.0 / k); }

}  // namespace

double logistic(double x) { return 1.0 / (1.0 + std::exp(-2.0 * x)); }

double logistic_inverse(double u) { return 0.5 * std::log(u / (1.0 - u)); }

ForecasterState::ForecasterState(int num_outcomes, std::size_t horizon, std::uint64_t seed)
    : num_outcomes_(num_outcomes),
      horizon_(horizon),
      counts_(static_cast<std::size_t>(std::max(num_outcomes, 0)), 0),
      eta_(horizon > 0 ? 1.0 / std::sqrt(static_cast<double>(horizon)) : 0.0),
      noise_cap_(isqrt(horizon)),
      rng_(seed) {
  if (num_outcomes < 2) throw ValidationError("forecaster needs K >= 2 outcomes");
  if (horizon == 0) throw ValidationError("forecaster horizon T must be positive");
}

double ForecasterState::mean() const {
  if (observed_ == 0) return 0.0;
  return static_cast<double>(counts_[1]) / static_cast<double>(observed_);
}

void ForecasterState::set_eta(double eta) {
  if (!(eta > 0.0)) throw ValidationError("learning rate eta must be positive");
  eta_ = eta;
}

void ForecasterState::observe(int outcome) {
  if (outcome < 0 || outcome >= num_outcomes_) {
    throw ValidationError(fmt::format("outcome {} outside [0, {})", outcome, num_outcomes_));
  }
  ++counts_[static_cast<std::size_t>(outcome)];
  ++observed_;
}

double hedge_cdf(double v, double mean, double scale) {
  if (v < 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  return logistic(scale * (v - mean));
}

double hedge_sample(double u, double mean, double scale) {
  if (u <= logistic(-scale * mean)) return 0.0;
  if (u > logistic(scale * (1.0 - mean))) return 1.0;
  return std::clamp(mean + logistic_inverse(u) / scale, 0.0, 1.0);
}

double forecast_hedge_step(ForecasterState& state) {
  if (state.num_outcomes() != 2) throw ValidationError("ForecastHedge is a binary forecaster");
  if (state.observed() == 0) return 0.5;
  const double scale = state.eta() * static_cast<double>(state.observed());
  return hedge_sample(state.rng().uniform_open(), state.mean(), scale);
}

std::vector<double> ftpl_prediction(std::span<const std::size_t> counts, std::span<const std::uint64_t> noise) {
  if (counts.size() != noise.size() || counts.size() < 2) {
    throw ValidationError("FTPL needs one count and one perturbation per outcome");
  }
  std::vector<double> perturbed(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    perturbed[i] = static_cast<double>(counts[i]) + static_cast<double>(noise[i]);
    total += perturbed[i];
  }
  if (total == 0.0) return uniform_point(static_cast<int>(counts.size()));
  for (double& v : perturbed) v /= total;
  return perturbed;
}

std::vector<double> forecast_ftpl_step(ForecasterState& state) {
  std::vector<std::uint64_t> noise(static_cast<std::size_t>(state.num_outcomes()));
  for (auto& n : noise) n = state.rng().uniform_int(state.noise_cap());
  return ftpl_prediction(state.counts(), noise);
}

std::string ForecasterSpec::id() const {
  switch (kind) {
    case ForecasterKind::kHedge:
      return "hedge";
    case ForecasterKind::kFtpl:
      return "ftpl";
    case ForecasterKind::kEmpirical:
      return "empirical";
    case ForecasterKind::kConstant:
      return constant ? fmt::format("constant={}", *constant) : "constant=beta";
  }
  return "unknown";
}

ForecasterSpec parse_forecaster(std::string_view text, int num_outcomes) {
  ForecasterSpec spec;
  spec.num_outcomes = num_outcomes;
  if (text == "hedge") {
    spec.kind = ForecasterKind::kHedge;
  } else if (text == "ftpl") {
    spec.kind = ForecasterKind::kFtpl;
  } else if (text == "empirical") {
    spec.kind = ForecasterKind::kEmpirical;
  } else if (text == "constant" || text == "constant=beta") {
    spec.kind = ForecasterKind::kConstant;
  } else if (text.starts_with("constant=")) {
    spec.kind = ForecasterKind::kConstant;
    const double v = parse_number(text.substr(9), "constant prediction");
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("constant prediction {} outside [0, 1]", v));
    spec.constant = v;
  } else {
    throw ValidationError(fmt::format("unknown forecaster '{}'", text));
  }
  if (spec.kind == ForecasterKind::kHedge && num_outcomes != 2) {
    throw ValidationError("hedge forecaster is binary only");
  }
  if (spec.kind == ForecasterKind::kConstant && spec.constant && num_outcomes != 2) {
    throw ValidationError("constant=<v> is binary only; use constant for the base rate");
  }
  return spec;
}

std::vector<std::string> pattern_names() {
  return {"half_ones", "alternating", "all_ones", "all_zeros", "cyclic", "bernoulli:<q>", "blocks:<len>"};
}

std::vector<int> oblivious_pattern(std::string_view pattern, std::size_t rounds, int num_outcomes,
                                   std::uint64_t seed) {
  if (num_outcomes < 2) throw ValidationError("pattern needs K >= 2 outcomes");
  std::vector<int> xs(rounds, 0);
  if (pattern == "half_ones") {
    for (std::size_t t = 0; t < rounds / 2; ++t) xs[t] = 1;
  } else if (pattern == "alternating") {
    for (std::size_t t = 0; t < rounds; ++t) xs[t] = t % 2 == 0 ? 1 : 0;
  } else if (pattern == "all_ones") {
    std::fill(xs.begin(), xs.end(), 1);
  } else if (pattern == "all_zeros") {
  } else if (pattern == "cyclic") {
    for (std::size_t t = 0; t < rounds; ++t) xs[t] = static_cast<int>(t % static_cast<std::size_t>(num_outcomes));
  } else if (pattern.starts_with("bernoulli:")) {
    const double q = parse_number(pattern.substr(10), "bernoulli mean");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError(fmt::format("bernoulli mean {} outside [0, 1]", q));
    CounterRng rng(seed);
    for (auto& x : xs) x = rng.uniform() < q ? 1 : 0;
  } else if (pattern.starts_with("blocks:")) {
    const double len = parse_number(pattern.substr(7), "block length");
    if (!(len >= 1.0) || len != std::floor(len)) throw ValidationError("block length must be a positive integer");
    const auto block = static_cast<std::size_t>(len);
    for (std::size_t t = 0; t < rounds; ++t) {
      xs[t] = static_cast<int>((t / block) % static_cast<std::size_t>(num_outcomes));
    }
  } else {
    throw ValidationError(fmt::format("unknown outcome pattern '{}'", pattern));
  }
  return xs;
}

Transcript run_forecaster(const ForecasterSpec& spec, std::span<const int> outcomes, std::size_t rounds,
                          std::uint64_t seed) {
  if (outcomes.size() < rounds) {
    throw ValidationError(fmt::format("adversary supplied {} outcomes for {} rounds", outcomes.size(), rounds));
  }
  if (outcomes.size() > rounds) throw ValidationError("adversary supplied more outcomes than rounds");
  const int k = spec.num_outcomes;
  ForecasterState state(k, rounds, seed);
  if (spec.eta) state.set_eta(*spec.eta);

  std::vector<double> constant_point;
  if (spec.kind == ForecasterKind::kConstant) {
    if (spec.constant) {
      constant_point = {1.0 - *spec.constant, *spec.constant};
    } else {
      constant_point.assign(static_cast<std::size_t>(k), 0.0);
      for (int x : outcomes) {
        if (x < 0 || x >= k) throw ValidationError(fmt::format("outcome {} outside [0, {})", x, k));
        constant_point[static_cast<std::size_t>(x)] += 1.0;
      }
      for (double& v : constant_point) v /= static_cast<double>(rounds);
    }
  }

  std::vector<std::vector<double>> predictions;
  predictions.reserve(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    switch (spec.kind) {
      case ForecasterKind::kHedge: {
        const double p = forecast_hedge_step(state);
        predictions.push_back({1.0 - p, p});
        break;
      }
      case ForecasterKind::kFtpl:
        predictions.push_back(forecast_ftpl_step(state));
        break;
      case ForecasterKind::kEmpirical: {
        if (state.observed() == 0) {
          predictions.push_back(uniform_point(k));
        } else {
          std::vector<double> p(static_cast<std::size_t>(k));
          for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = static_cast<double>(state.counts()[i]) / static_cast<double>(state.observed());
          }
          predictions.push_back(std::move(p));
        }
        break;
      }
      case ForecasterKind::kConstant:
        predictions.push_back(constant_point);
        break;
    }
    state.observe(outcomes[t]);
  }
  return Transcript::multiclass(k, std::vector<int>(outcomes.begin(), outcomes.end()), predictions);
}

Transcript run_adaptive_demo(const ForecasterSpec& spec, AdaptiveAdversary& adversary, std::size_t rounds,
                             std::uint64_t seed) {
  if (spec.num_outcomes != 2) throw ValidationError("adaptive demo is binary only");
  if (spec.kind == ForecasterKind::kConstant && !spec.constant) {
    throw ValidationError("constant=beta is undefined against an adaptive adversary");
  }
  ForecasterState state(2, rounds, seed);
  if (spec.eta) state.set_eta(*spec.eta);
  std::vector<int> xs;
  std::vector<double> ps;
  for (std::size_t t = 0; t < rounds; ++t) {
    double p = 0.5;
    switch (spec.kind) {
      case ForecasterKind::kHedge:
        p = forecast_hedge_step(state);
        break;
      case ForecasterKind::kFtpl:
        p = forecast_ftpl_step(state)[1];
        break;
      case ForecasterKind::kEmpirical:
        p = state.observed() == 0 ? 0.5 : state.mean();
        break;
      case ForecasterKind::kConstant:
        p = *spec.constant;
        break;
    }
    const int x = adversary.respond(p);
    xs.push_back(x);
    ps.push_back(p);
    state.observe(x);
  }
  return Transcript::binary(std::move(xs), ps);
}

}  // namespace ucal
