#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pab/scenario.hpp"
#include "pab/supply.hpp"

namespace pab {

// Absolute residual tolerance used by the clearing-price solvers.
double clearing_tolerance(const Scenario& scenario);

// The unique p* in [0, p_hat] with D(p*) = K * sum_i [p* - x_i]_+.
// Affine demand uses the exact rational formula on the active piece; other
// demands use bisection with a Newton polish. A producer with x_i = p* sells
// zero (ties count as inactive).
double clearing_price(const Scenario& scenario, const ActivationProfile& x);

// Clearing price when producer i withdraws (activation price p_hat). Above
// this price producer i optimally sells nothing.
double threshold_price(const Scenario& scenario, std::size_t i,
                       const ActivationProfile& x);
// Same, from the other producers' prices alone.
double threshold_price_excluding(const Scenario& scenario, std::size_t i,
                                 const std::vector<double>& x_minus_i);

// Producer i's pay-as-bid utility at a ramp profile:
//   K*(p*·z - z^2/2) - C_i(K·z)   with z = [p* - x_i]_+.
double pab_utility(const Scenario& scenario, const ActivationProfile& x,
                   std::size_t i);

// Clearing price of arbitrary sampled supplies: the root of
// D(p) = sum_j S_j(p), found by bisection over the union of breakpoints.
double clearing_price_of_supplies(const Scenario& scenario,
                                  const std::vector<SampledSupply>& supplies);

// Pay-as-bid utility of producer i under arbitrary sampled supplies:
//   p*·S_i(p*) - integral of S_i over [0, p*] - C_i(S_i(p*)),
// the integral computed exactly on the piecewise-linear segments.
// Preconditions: every supply passes lipschitz_check(K) and shares p_hat.
double utility_of_supply(const Scenario& scenario,
                         const std::vector<SampledSupply>& supplies,
                         std::size_t i);

struct AffinizeResult {
  double x_i = 0.0;          // activation price of the replacement ramp
  SampledSupply ramp;        // K*[p - x_i]_+
};

// Replaces S_i with the ramp through (p*, S_i(p*)): the clearing price is
// unchanged and the utility never decreases (strictly increases unless S_i
// already equals the ramp below p*).
AffinizeResult affinize(const Scenario& scenario,
                        const std::vector<SampledSupply>& supplies,
                        std::size_t i);

struct ValidationReport {
  bool ok = true;
  double p_hat = 0.0;
  std::vector<std::string> violations;
};

// Checks demand monotonicity/concavity and cost monotonicity/convexity.
// Affine and quadratic kinds are validated symbolically; other kinds are
// sampled on a uniform grid. Never throws; violations are listed.
ValidationReport validate(const Scenario& scenario, std::size_t grid_points = 1024);

}  // namespace pab
