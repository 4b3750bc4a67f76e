#pragma once

#include <span>
#include <vector>

#include "ucal/rng.hpp"
#include "ucal/transcript.hpp"
#include "ucal/utility.hpp"

namespace ucal {

// pi[a] is the action played in place of a.
using SwapFunction = std::vector<int>;

// argmax_a sum_x p_x u(a, x); ties go to the lowest index.
int best_response(const UtilityMatrix& u, std::span<const double> p);
int best_response_binary(const UtilityMatrix& u, double p);

// Softmax over cumulative utilities exp(eta * sum_s u(a, x_s)).
std::vector<double> hedge_distribution(const UtilityMatrix& u, std::span<const int> history, double eta);
int hedge_agent_step(const UtilityMatrix& u, std::span<const int> history, double eta, CounterRng& rng);

// Maps each action played as a best response to the action with the highest
// realized utility over those rounds. An action keeps itself on ties; actions
// never played map to themselves.
SwapFunction best_swap(const UtilityMatrix& u, const Transcript& transcript);

// Binary squared-loss agent u(a, x) = -(x - a)^2 whose actions are the
// distinct predictions and their empirical frequencies m_p / n_p, sorted.
UtilityMatrix squared_loss_agent(const Transcript& transcript);

}  // namespace ucal
