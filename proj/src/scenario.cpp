#include "pab/scenario.hpp"

#include <cmath>
#include <string>

#include "pab/errors.hpp"

namespace pab {

Scenario::Scenario(std::vector<CostModel> costs_in, DemandModel demand_in, double k)
    : costs(std::move(costs_in)), demand(std::move(demand_in)), lipschitz_k(k) {
  if (costs.empty()) throw InvalidModel("scenario requires at least one producer");
  if (!(lipschitz_k > 0.0)) throw InvalidModel("lipschitz constant must be positive");
}

Scenario Scenario::normalized() const {
  if (lipschitz_k == 1.0) return *this;
  std::vector<CostModel> cs;
  cs.reserve(costs.size());
  for (const auto& c : costs) cs.push_back(c.normalized(lipschitz_k));
  return Scenario(std::move(cs), demand.scaled(1.0 / lipschitz_k), 1.0);
}

Scenario Scenario::with_k(double k) const { return Scenario(costs, demand, k); }

bool Scenario::all_quadratic() const {
  for (const auto& c : costs)
    if (!c.is_quadratic()) return false;
  return true;
}

double Scenario::common_b(double rel_tol) const {
  double b0 = costs.front().marginal_at_zero();
  double scale = std::max(1.0, std::abs(b0));
  for (const auto& c : costs) {
    if (std::abs(c.marginal_at_zero() - b0) > rel_tol * scale)
      throw HeterogeneousB("producers have distinct marginal costs at zero");
  }
  return b0;
}

void check_profile(const Scenario& scenario, const ActivationProfile& profile) {
  if (profile.size() != scenario.n())
    throw InvalidProfile("profile has " + std::to_string(profile.size()) +
                         " entries for " + std::to_string(scenario.n()) +
                         " producers");
  const double ph = scenario.p_hat();
  for (double xi : profile.x) {
    if (!(xi >= 0.0) || !(xi <= ph) || !std::isfinite(xi))
      throw InvalidProfile("activation price outside [0, p_hat]");
  }
}

}  // namespace pab
