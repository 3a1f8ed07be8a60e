#include "pab/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pab/errors.hpp"

namespace pab {

namespace {

// Excess demand at price p: D(p) - K * sum [p - x_i]_+.
double excess(const Scenario& s, const std::vector<double>& x, double p) {
  double supply = 0.0;
  for (double xi : x)
    if (xi < p) supply += p - xi;
  return s.demand.eval(p) - s.lipschitz_k * supply;
}

double excess_slope(const Scenario& s, const std::vector<double>& x, double p) {
  double active = 0.0;
  for (double xi : x)
    if (xi < p) active += 1.0;
  return s.demand.deriv(p) - s.lipschitz_k * active;
}

// Exact rational solve for affine demand: walk the pieces cut by the sorted
// activation prices; on the piece where the excess crosses zero,
//   gamma (p_hat - p) = K (m p - s)  with m actives summing to s.
double clearing_affine(const Scenario& s, const std::vector<double>& x) {
  const double gamma = s.demand.gamma();
  const double p_hat = s.p_hat();
  const double k = s.lipschitz_k;

  std::vector<double> xs = x;
  std::sort(xs.begin(), xs.end());

  double m = 0.0, sum = 0.0;
  std::size_t j = 0;
  while (true) {
    double hi = (j < xs.size() && xs[j] < p_hat) ? xs[j] : p_hat;
    double g_hi = gamma * (p_hat - hi) - k * (m * hi - sum);
    if (g_hi <= 0.0 || hi >= p_hat) {
      double p = (gamma * p_hat + k * sum) / (gamma + k * m);
      return std::clamp(p, 0.0, p_hat);
    }
    while (j < xs.size() && xs[j] == hi) {
      m += 1.0;
      sum += xs[j];
      ++j;
    }
  }
}

double clearing_general(const Scenario& s, const std::vector<double>& x) {
  const double p_hat = s.p_hat();
  double a = 0.0, b = p_hat;
  double ga = excess(s, x, a);
  double gb = excess(s, x, b);
  if (ga < 0.0) throw NoRoot("demand model broken: D(0) <= supply at p = 0");
  if (gb >= 0.0) return p_hat;  // all activation prices at or above p_hat

  for (int it = 0; it < 200 && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() * p_hat; ++it) {
    double mid = 0.5 * (a + b);
    double gm = excess(s, x, mid);
    if (gm >= 0.0) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
      gb = gm;
    }
  }
  // Newton polish inside the bracket.
  double p = (std::abs(ga) <= std::abs(gb)) ? a : b;
  for (int it = 0; it < 4; ++it) {
    double g = excess(s, x, p);
    double dg = excess_slope(s, x, p);
    if (dg >= 0.0) break;
    double step = g / dg;
    double next = p - step;
    if (!(next >= a && next <= b)) break;
    p = next;
  }
  return std::clamp(p, 0.0, p_hat);
}

}  // namespace

double clearing_tolerance(const Scenario& scenario) {
  return 1e-12 * std::max(1.0, scenario.demand.eval(0.0));
}

double clearing_price(const Scenario& scenario, const ActivationProfile& x) {
  check_profile(scenario, x);
  if (scenario.demand.is_affine()) return clearing_affine(scenario, x.x);
  return clearing_general(scenario, x.x);
}

double threshold_price(const Scenario& scenario, std::size_t i,
                       const ActivationProfile& x) {
  check_profile(scenario, x);
  if (i >= scenario.n()) throw InvalidProfile("producer index out of range");
  ActivationProfile withdrawn = x;
  withdrawn[i] = scenario.p_hat();
  return clearing_price(scenario, withdrawn);
}

double threshold_price_excluding(const Scenario& scenario, std::size_t i,
                                 const std::vector<double>& x_minus_i) {
  if (i >= scenario.n() || x_minus_i.size() + 1 != scenario.n())
    throw InvalidProfile("x_minus_i has the wrong length");
  std::vector<double> full(x_minus_i);
  full.insert(full.begin() + static_cast<std::ptrdiff_t>(i), scenario.p_hat());
  return clearing_price(scenario, ActivationProfile(std::move(full)));
}

double pab_utility(const Scenario& scenario, const ActivationProfile& x,
                   std::size_t i) {
  if (i >= scenario.n()) throw InvalidProfile("producer index out of range");
  const double p = clearing_price(scenario, x);
  const double k = scenario.lipschitz_k;
  const double z = (x[i] < p) ? p - x[i] : 0.0;
  return k * (p * z - 0.5 * z * z) - scenario.costs[i].eval(k * z);
}

double clearing_price_of_supplies(const Scenario& scenario,
                                  const std::vector<SampledSupply>& supplies) {
  if (supplies.size() != scenario.n())
    throw InvalidProfile("supply list does not match producer count");
  const double p_hat = scenario.p_hat();
  for (const auto& sup : supplies) {
    if (std::abs(sup.p_hat() - p_hat) > 1e-12 * std::max(1.0, p_hat))
      throw InconsistentDomain("supply domain does not end at demand's p_hat");
    if (!sup.lipschitz_check(scenario.lipschitz_k))
      throw LipschitzViolation("supply slope exceeds the scenario's K");
  }

  auto g = [&](double p) {
    double total = 0.0;
    for (const auto& sup : supplies) total += sup.value(p);
    return scenario.demand.eval(p) - total;
  };

  double a = 0.0, b = p_hat;
  double ga = g(a), gb = g(b);
  if (ga < 0.0) throw NoRoot("demand model broken: D(0) < 0");
  if (gb >= 0.0) return p_hat;
  for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, p_hat); ++it) {
    double mid = 0.5 * (a + b);
    double gm = g(mid);
    if (gm >= 0.0) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
      gb = gm;
    }
  }
  return (std::abs(ga) <= std::abs(gb)) ? a : b;
}

double utility_of_supply(const Scenario& scenario,
                         const std::vector<SampledSupply>& supplies,
                         std::size_t i) {
  if (i >= scenario.n()) throw InvalidProfile("producer index out of range");
  const double p = clearing_price_of_supplies(scenario, supplies);
  const double q = supplies[i].value(p);
  return p * q - supplies[i].integral_to(p) - scenario.costs[i].eval(q);
}

AffinizeResult affinize(const Scenario& scenario,
                        const std::vector<SampledSupply>& supplies,
                        std::size_t i) {
  if (i >= scenario.n()) throw InvalidProfile("producer index out of range");
  const double p = clearing_price_of_supplies(scenario, supplies);
  const double q = supplies[i].value(p);
  const double k = scenario.lipschitz_k;
  // The K-sloped ramp through (p*, q): its activation price. q <= K p* by the
  // Lipschitz bound, so x_i >= 0 up to roundoff.
  double x_i = std::clamp(p - q / k, 0.0, scenario.p_hat());
  return AffinizeResult{x_i, SampledSupply::ramp(x_i, k, scenario.p_hat())};
}

namespace {

void check_demand_sampled(const DemandModel& d, std::size_t grid,
                          std::vector<std::string>& out) {
  const double p_hat = d.p_hat();
  const double slack = 1e-9 * std::max(1.0, d.eval(0.0));
  bool not_decreasing = false, not_concave = false;
  for (std::size_t s = 0; s <= grid; ++s) {
    double p = p_hat * static_cast<double>(s) / static_cast<double>(grid);
    if (d.deriv(p) >= 0.0) not_decreasing = true;
    if (d.second_deriv(p) > slack) not_concave = true;
  }
  if (not_decreasing) out.push_back("demand is not strictly decreasing on [0, p_hat]");
  if (not_concave) out.push_back("demand is not concave on [0, p_hat]");
  if (std::abs(d.eval(p_hat)) > slack) out.push_back("demand does not vanish at p_hat");
}

void check_cost_sampled(const CostModel& c, std::size_t index, double q_max,
                        std::size_t grid, std::vector<std::string>& out) {
  bool decreasing = false, concave = false;
  for (std::size_t s = 0; s <= grid; ++s) {
    double q = q_max * static_cast<double>(s) / static_cast<double>(grid);
    if (c.deriv(q) < 0.0) decreasing = true;
    if (c.second_deriv(q) < 0.0) concave = true;
  }
  std::string tag = "producer " + std::to_string(index) + " cost ";
  if (c.eval(0.0) < 0.0) out.push_back(tag + "is negative at q = 0");
  if (decreasing) out.push_back(tag + "is decreasing somewhere on [0, q_max]");
  if (concave) out.push_back(tag + "is not convex somewhere on [0, q_max]");
}

}  // namespace

ValidationReport validate(const Scenario& scenario, std::size_t grid_points) {
  ValidationReport report;
  report.p_hat = scenario.p_hat();
  // Affine demand and quadratic costs are valid by construction; only the
  // sampled kinds need a grid.
  if (!scenario.demand.is_affine())
    check_demand_sampled(scenario.demand, grid_points, report.violations);
  const double q_max = std::max(1.0, scenario.demand.eval(0.0));
  for (std::size_t i = 0; i < scenario.n(); ++i) {
    if (!scenario.costs[i].is_quadratic())
      check_cost_sampled(scenario.costs[i], i, q_max, grid_points, report.violations);
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace pab
