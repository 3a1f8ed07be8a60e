#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pab/scenario.hpp"

namespace pab {

struct OrderingCheck {
  std::string name;
  bool holds = false;
  double slack = 0.0;  // positive when the inequality holds strictly
};

struct ComparisonReport {
  std::optional<double> p_cournot;        // symmetric b = 0 only
  std::optional<double> p_bertrand_low;   // alpha = 0
  std::vector<std::pair<double, double>> p_bertrand_alpha;  // (alpha, price)
  double p_sfe = 0.0;
  double p_pab_infinity = 0.0;
  double d_r = 0.0;  // (p_sfe - p_inf) / p_sfe
  std::vector<double> sfe_slopes;
  std::vector<OrderingCheck> orderings;
};

// Symmetric Cournot price for affine demand and costs c q^2 / 2:
// per-firm quantity gamma*p_hat/(1+n+c*gamma), price p_hat - n*p_hat/(1+n+c*gamma).
double cournot_price(double gamma, double p_hat, double c, std::size_t n);

// Symmetric Bertrand equilibrium family: p_B(alpha) = gamma*p_hat*c /
// (gamma*c + 2(n - alpha)) for alpha in [0, n^2/(1+n)].
double bertrand_price(double gamma, double p_hat, double c, std::size_t n,
                      double alpha);

// Slopes of the linear supply-function equilibrium: the positive solution of
// beta_i = (1 - c_i beta_i) (gamma + sum_{j != i} beta_j), found by damped
// per-coordinate iteration. Each beta_i lies strictly inside (0, 1/c_i).
std::vector<double> sfe_slopes(double gamma, const std::vector<double>& c,
                               double damping = 0.5, double tol = 1e-12,
                               int max_iter = 100000);

double sfe_price(double gamma, double p_hat, const std::vector<double>& beta);

// Residual of the slope equation, coordinate-wise max.
double sfe_residual(double gamma, const std::vector<double>& c,
                    const std::vector<double>& beta);

// All baseline prices for an affine + quadratic scenario with b = 0, plus
// ordering checks: p_B(0) < p_inf < p_C (symmetric case), p_inf < p_SFE, and
// p_B(n/2) = p_inf. Cournot/Bertrand entries are omitted for heterogeneous c.
ComparisonReport ordering_report(const Scenario& scenario);

}  // namespace pab
