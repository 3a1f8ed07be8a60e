#pragma once

#include <cstddef>
#include <vector>

#include "pab/cost.hpp"
#include "pab/demand.hpp"

namespace pab {

// A market instance: n producers' costs, aggregate demand, and the common
// Lipschitz bound K on supply-function slopes. Immutable after construction
// and safe to share across threads.
struct Scenario {
  std::vector<CostModel> costs;
  DemandModel demand;
  double lipschitz_k = 1.0;

  Scenario(std::vector<CostModel> costs_in, DemandModel demand_in, double k);

  std::size_t n() const { return costs.size(); }
  double p_hat() const { return demand.p_hat(); }
  double k() const { return lipschitz_k; }

  // The equivalent K = 1 game: demand D(p)/K, costs C(K q)/K. Clearing
  // prices and activation profiles are shared with the original game;
  // utilities scale by 1/K.
  Scenario normalized() const;

  // Same demand and costs with a different Lipschitz bound (a different
  // game, not an equivalent one; used by K sweeps).
  Scenario with_k(double k) const;

  bool all_quadratic() const;
  // Common marginal cost at zero, or throws HeterogeneousB.
  double common_b(double rel_tol = 1e-12) const;
};

// Vector of activation prices, one per producer, each in [0, p_hat]. The
// ramp supply it encodes is S_i(p) = K*[p - x_i]_+.
struct ActivationProfile {
  std::vector<double> x;

  ActivationProfile() = default;
  explicit ActivationProfile(std::vector<double> xs) : x(std::move(xs)) {}

  std::size_t size() const { return x.size(); }
  double operator[](std::size_t i) const { return x[i]; }
  double& operator[](std::size_t i) { return x[i]; }

  static ActivationProfile zeros(std::size_t n) {
    return ActivationProfile(std::vector<double>(n, 0.0));
  }
  static ActivationProfile constant(std::size_t n, double v) {
    return ActivationProfile(std::vector<double>(n, v));
  }
};

// Throws InvalidProfile unless profile has scenario.n() entries in [0, p_hat].
void check_profile(const Scenario& scenario, const ActivationProfile& profile);

}  // namespace pab
