#include "pab/comparative.hpp"

#include <algorithm>
#include <cmath>

#include "pab/equilibrium.hpp"
#include "pab/errors.hpp"

namespace pab {

double cournot_price(double gamma, double p_hat, double c, std::size_t n) {
  if (!(gamma > 0.0) || !(p_hat > 0.0) || !(c > 0.0) || n == 0)
    throw NonPositiveParams("cournot needs positive gamma, p_hat, c and n >= 1");
  const double nn = static_cast<double>(n);
  return p_hat - nn * p_hat / (1.0 + nn + c * gamma);
}

double bertrand_price(double gamma, double p_hat, double c, std::size_t n,
                      double alpha) {
  if (!(gamma > 0.0) || !(p_hat > 0.0) || !(c > 0.0) || n == 0)
    throw NonPositiveParams("bertrand needs positive gamma, p_hat, c and n >= 1");
  const double nn = static_cast<double>(n);
  const double alpha_max = nn * nn / (1.0 + nn);
  if (alpha < 0.0 || alpha > alpha_max)
    throw AlphaOutOfRange("alpha outside [0, n^2/(1+n)]");
  return gamma * p_hat * c / (gamma * c + 2.0 * (nn - alpha));
}

std::vector<double> sfe_slopes(double gamma, const std::vector<double>& c,
                               double damping, double tol, int max_iter) {
  if (!(gamma > 0.0) || c.empty())
    throw NonPositiveParams("sfe needs gamma > 0 and at least one producer");
  for (double ci : c)
    if (!(ci > 0.0)) throw NonPositiveParams("sfe needs positive cost coefficients");

  const std::size_t n = c.size();
  std::vector<double> beta(n);
  for (std::size_t i = 0; i < n; ++i) beta[i] = 0.5 / c[i];

  // Per-coordinate solve of beta_i (1 + c_i (gamma + B_-i)) = gamma + B_-i,
  // blended with the previous iterate. Keeps every beta_i in (0, 1/c_i).
  for (int it = 0; it < max_iter; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double others = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others += beta[j];
      double t = (gamma + others) / (1.0 + c[i] * (gamma + others));
      double next = (1.0 - damping) * beta[i] + damping * t;
      change = std::max(change, std::abs(next - beta[i]));
      beta[i] = next;
    }
    if (change <= tol) {
      if (sfe_residual(gamma, c, beta) > 1e-10)
        throw NoConvergence("sfe residual above target at fixed point");
      return beta;
    }
  }
  throw NoConvergence("sfe slope iteration did not converge", beta, max_iter);
}

double sfe_residual(double gamma, const std::vector<double>& c,
                    const std::vector<double>& beta) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double others = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j)
      if (j != i) others += beta[j];
    worst = std::max(worst, std::abs(beta[i] - (1.0 - c[i] * beta[i]) * (gamma + others)));
  }
  return worst;
}

double sfe_price(double gamma, double p_hat, const std::vector<double>& beta) {
  double sum = 0.0;
  for (double b : beta) sum += b;
  return gamma * p_hat / (gamma + sum);
}

ComparisonReport ordering_report(const Scenario& scenario) {
  if (!scenario.demand.is_affine())
    throw NotAffine("comparison baselines need affine demand");
  if (!scenario.all_quadratic())
    throw NotQuadratic("comparison baselines need quadratic costs");
  const double b = scenario.common_b();
  if (b != 0.0)
    throw UnsupportedScenario("comparison baselines are defined for b = 0");

  const double gamma = scenario.demand.gamma();
  const double p_hat = scenario.p_hat();
  const std::size_t n = scenario.n();
  std::vector<double> c;
  c.reserve(n);
  for (const auto& cm : scenario.costs) c.push_back(cm.c());
  const bool symmetric =
      std::all_of(c.begin(), c.end(), [&](double ci) { return ci == c.front(); });

  ComparisonReport rep;
  rep.sfe_slopes = sfe_slopes(gamma, c);
  rep.p_sfe = sfe_price(gamma, p_hat, rep.sfe_slopes);
  rep.p_pab_infinity = limit_equilibrium(scenario).p_infinity;
  rep.d_r = (rep.p_sfe - rep.p_pab_infinity) / rep.p_sfe;

  auto add_ordering = [&rep](const std::string& name, double lhs, double rhs) {
    rep.orderings.push_back(OrderingCheck{name, lhs < rhs, rhs - lhs});
  };

  if (symmetric) {
    const double cs = c.front();
    const double nn = static_cast<double>(n);
    rep.p_cournot = cournot_price(gamma, p_hat, cs, n);
    rep.p_bertrand_low = bertrand_price(gamma, p_hat, cs, n, 0.0);
    for (double alpha : {0.0, 0.25 * nn, 0.5 * nn, nn * nn / (1.0 + nn)})
      rep.p_bertrand_alpha.emplace_back(alpha, bertrand_price(gamma, p_hat, cs, n, alpha));
    add_ordering("p_bertrand(0) < p_infinity", *rep.p_bertrand_low, rep.p_pab_infinity);
    add_ordering("p_infinity < p_cournot", rep.p_pab_infinity, *rep.p_cournot);
    double pb_half = bertrand_price(gamma, p_hat, cs, n, 0.5 * nn);
    double rel = std::abs(pb_half - rep.p_pab_infinity) / std::max(1e-300, rep.p_pab_infinity);
    rep.orderings.push_back(OrderingCheck{"p_bertrand(n/2) == p_infinity", rel <= 1e-12, rel});
  }
  add_ordering("p_infinity < p_sfe", rep.p_pab_infinity, rep.p_sfe);
  return rep;
}

}  // namespace pab
