#pragma once

#include <cstddef>

#include "ucal/transcript.hpp"

// Brute-force references for certifying the fast paths. Nothing here calls
// into metrics or ucal_lp.
namespace ucal::oracle {

// Direct O(T) summation of l_v(p_t, x_t) - l_v(beta, x_t).
double vreg_naive(double v, const Transcript& transcript);

// Max of vreg_naive over a grid: the base rate, interval midpoints, points
// just inside every interval end, and `uniform_points` evenly spaced values
// (exact breakpoints excluded).
double vcal_grid(const Transcript& transcript, std::size_t uniform_points = 2001);

// Exact optimum of the U-calibration LP by enumerating basic feasible
// solutions. Binary transcripts with at most 3 distinct predictions.
double max_agent_reg_vertex(const Transcript& transcript);

}  // namespace ucal::oracle
