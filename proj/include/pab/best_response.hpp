#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pab/scenario.hpp"

namespace pab {

// Sign pattern of the utility derivative on one partition interval.
// (+0-) means an interior sign change from positive to negative; (0-) and
// (+0) put the stationary point on the left/right endpoint.
enum class SignClass { Plus, Minus, PlusZeroMinus, ZeroMinus, PlusZero };

std::string to_string(SignClass c);

struct PartitionInterval {
  double lo = 0.0;
  double hi = 0.0;
  SignClass sign = SignClass::Plus;
};

// Decomposition of [0, threshold] into intervals on which the utility is
// twice differentiable in the activation price, with the derivative's sign
// class per interval. A valid partition matches (+)* [(+0-)] (-)*.
struct BreakpointPartition {
  std::vector<PartitionInterval> intervals;
  bool matches_unimodal_pattern() const;
};

struct BestResponseResult {
  double maximizer = 0.0;       // activation price in [0, p_hat]
  bool is_plateau = false;      // whole interval [threshold, p_hat] optimal
  double utility_at_max = 0.0;  // utility in the original (un-normalized) game
  double threshold = 0.0;       // clearing price if the producer withdraws
  BreakpointPartition partition;
};

// f(w) = w + sum_{j != i} [w - x_j]_+ - D(w) for the K = 1 game. Strictly
// increasing with slope > 1 wherever differentiable; its inverse maps an
// activation price to the clearing price it induces.
double f_eval(const Scenario& normalized, std::size_t i,
              const std::vector<double>& x_minus_i, double w);

// phi(z) = f^{-1}(z): the clearing price when producer i bids activation
// price z, for z in [0, threshold]. Throws OutOfRange above the threshold.
double phi_eval(const Scenario& normalized, std::size_t i,
                const std::vector<double>& x_minus_i, double z);

// d/dz of producer i's utility in the K = 1 game, valid in the interior of a
// partition interval:
//   (phi(z) - C_i'(phi(z) - z)) * (phi'(z) - 1) + phi(z) - z,
// with phi'(z) = 1 / f'(phi(z)). Undefined exactly at breakpoints; callers
// probe one-sided values by nudging z.
double utility_derivative(const Scenario& normalized, std::size_t i,
                          const std::vector<double>& x_minus_i, double z);

// Exact best response of producer i to the others' activation prices.
// Normalizes to K = 1, partitions [0, threshold] at the points f(x_j),
// classifies each interval by one-sided derivative signs, and locates the
// single + to - transition (bisection on the derivative when it is interior).
BestResponseResult best_response(const Scenario& scenario, std::size_t i,
                                 const std::vector<double>& x_minus_i);

// Brute-force cross-check: argmax of pab_utility over a uniform grid of
// grid_n points on [0, p_hat], ties broken toward the smallest price.
double best_response_grid_oracle(const Scenario& scenario, std::size_t i,
                                 const std::vector<double>& x_minus_i,
                                 std::size_t grid_n);

// Helpers shared with the equilibrium solvers.
std::vector<double> drop_index(const std::vector<double>& x, std::size_t i);

}  // namespace pab
