#include "pab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pab/best_response.hpp"
#include "pab/errors.hpp"
#include "pab/market.hpp"

namespace pab {

namespace {

// Derivatives of the quadratically continued normalized cost
// (C(Kq)/K for q >= 0, second-order Taylor continuation below zero).
struct ExtendedCost {
  const CostModel* cost;
  double k;
  double deriv(double q) const {
    if (q >= 0.0) return cost->deriv(k * q);
    return cost->deriv(0.0) + cost->second_deriv(0.0) * k * q;
  }
  double second_deriv(double q) const {
    if (q >= 0.0) return cost->second_deriv(k * q) * k;
    return cost->second_deriv(0.0) * k;
  }
};

double all_active_price(const Scenario& s, const std::vector<double>& x) {
  const double gbar = s.demand.gamma() / s.lipschitz_k;
  double sum = 0.0;
  for (double xi : x) sum += xi;
  return (gbar * s.p_hat() + sum) /
         (static_cast<double>(s.n()) + gbar);
}

// First-order conditions of the all-active game, one residual per producer.
std::vector<double> all_active_foc(const Scenario& s, const std::vector<double>& x) {
  const double n = static_cast<double>(s.n());
  const double gbar = s.demand.gamma() / s.lipschitz_k;
  const double pt = all_active_price(s, x);
  std::vector<double> f(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) {
    ExtendedCost ec{&s.costs[i], s.lipschitz_k};
    f[i] = pt - (n + gbar) * x[i] + (n + gbar - 1.0) * ec.deriv(pt - x[i]);
  }
  return f;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Gaussian elimination with partial pivoting; a is row-major n x n.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * b[c];
    b[r] = acc / a[r * n + r];
  }
  return true;
}

EquilibriumResult make_result(const Scenario& s, std::vector<double> x,
                              SolveMethod method, int iterations, double residual) {
  EquilibriumResult r;
  r.method = method;
  r.iterations = iterations;
  r.residual = residual;
  r.x_star = ActivationProfile(std::move(x));
  r.p_star = clearing_price(s, r.x_star);
  if (s.demand.is_affine()) {
    try {
      s.common_b();
      r.uniqueness_guaranteed = true;
    } catch (const HeterogeneousB&) {
    }
  }
  const double k = s.lipschitz_k;
  // Activation prices within the tie band of p* count as withdrawn.
  const double tie = 1e-9 * std::max(1.0, s.p_hat());
  r.quantities.resize(s.n());
  r.utilities.resize(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) {
    bool active = r.x_star[i] < r.p_star - tie;
    double z = active ? r.p_star - r.x_star[i] : 0.0;
    r.quantities[i] = k * z;
    r.utilities[i] = k * (r.p_star * z - 0.5 * z * z) - s.costs[i].eval(k * z);
    if (active) r.active_set.push_back(i);
    if (s.costs[i].marginal_at_zero() < r.p_star) r.active_set_by_cost.push_back(i);
    if (active)
      r.equivalent_intervals.emplace_back(r.x_star[i], r.x_star[i]);
    else
      r.equivalent_intervals.emplace_back(r.p_star, s.p_hat());
  }
  return r;
}

}  // namespace

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::IteratedBR: return "iterated-br";
    case SolveMethod::AllActive: return "all-active";
    case SolveMethod::ClosedForm: return "closed-form";
  }
  return "?";
}

EquilibriumResult solve_nash_iterated_br(const Scenario& scenario,
                                         const ActivationProfile& init,
                                         Schedule schedule, double tol,
                                         int max_iter, double damping) {
  check_profile(scenario, init);
  if (max_iter < 1) throw InvalidModel("max_iter must be at least 1");
  if (!(damping > 0.0) || damping > 1.0)
    throw InvalidModel("damping must lie in (0, 1]");
  if (tol <= 0.0) tol = 1e-8 * scenario.p_hat();

  std::vector<double> x = init.x;
  const std::size_t n = scenario.n();
  std::vector<char> plateau(n, 0);
  for (int iter = 1; iter <= max_iter; ++iter) {
    double delta = 0.0;
    if (schedule == Schedule::RoundRobin) {
      for (std::size_t i = 0; i < n; ++i) {
        auto br = best_response(scenario, i, drop_index(x, i));
        plateau[i] = br.is_plateau ? 1 : 0;
        double nx = (1.0 - damping) * x[i] + damping * br.maximizer;
        delta = std::max(delta, std::abs(nx - x[i]));
        x[i] = nx;
      }
    } else {
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto br = best_response(scenario, i, drop_index(x, i));
        plateau[i] = br.is_plateau ? 1 : 0;
        next[i] = (1.0 - damping) * x[i] + damping * br.maximizer;
      }
      for (std::size_t i = 0; i < n; ++i)
        delta = std::max(delta, std::abs(next[i] - x[i]));
      x = std::move(next);
    }
    if (delta <= tol) {
      // A withdrawn producer tracks the moving threshold, which lags the
      // final clearing price by up to one sweep's tolerance. Settle those
      // producers at (or above) the clearing price of the active set alone,
      // where their supply is exactly zero and activity reads unambiguously.
      bool any_plateau = false;
      std::vector<double> actives_only = x;
      for (std::size_t i = 0; i < n; ++i) {
        if (plateau[i]) {
          actives_only[i] = scenario.p_hat();
          any_plateau = true;
        }
      }
      if (any_plateau) {
        double p_active = clearing_price(scenario, ActivationProfile(actives_only));
        for (std::size_t i = 0; i < n; ++i)
          if (plateau[i]) x[i] = std::min(scenario.p_hat(), std::max(x[i], p_active));
      }
      return make_result(scenario, std::move(x), SolveMethod::IteratedBR, iter, delta);
    }
  }
  throw NoConvergence("best-response iteration did not converge", std::move(x), max_iter);
}

EquilibriumResult solve_all_active(const Scenario& scenario) {
  if (!scenario.demand.is_affine()) throw NotAffine("all-active solver needs affine demand");
  const std::size_t n = scenario.n();
  const double nn = static_cast<double>(n);
  const double gbar = scenario.demand.gamma() / scenario.lipschitz_k;
  const double scale = std::max(1.0, scenario.p_hat());
  const double target = 1e-12 * scale;

  std::vector<double> x(n, 0.5 * scenario.p_hat());
  std::vector<double> f = all_active_foc(scenario, x);
  double res = inf_norm(f);
  int iters = 0;

  bool newton_ok = true;
  for (; iters < 100 && res > target; ++iters) {
    const double pt = all_active_price(scenario, x);
    const double ptj = 1.0 / (nn + gbar);
    std::vector<double> jac(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      ExtendedCost ec{&scenario.costs[i], scenario.lipschitz_k};
      double cpp = ec.second_deriv(pt - x[i]);
      for (std::size_t j = 0; j < n; ++j) {
        double dij = (i == j) ? 1.0 : 0.0;
        jac[i * n + j] = ptj - (nn + gbar) * dij + (nn + gbar - 1.0) * cpp * (ptj - dij);
      }
    }
    std::vector<double> rhs = f;
    for (double& v : rhs) v = -v;
    if (!solve_dense(jac, rhs, n)) {
      newton_ok = false;
      break;
    }
    double step = 1.0;
    std::vector<double> trial(n);
    double trial_res = res;
    for (int halvings = 0; halvings < 40; ++halvings) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * rhs[i];
      trial_res = inf_norm(all_active_foc(scenario, trial));
      if (trial_res < res) break;
      step *= 0.5;
    }
    if (trial_res >= res) {
      newton_ok = false;
      break;
    }
    x = trial;
    f = all_active_foc(scenario, x);
    res = trial_res;
  }

  (void)newton_ok;
  if (res > target) {
    // Damped fixed point on the rearranged first-order conditions.
    double eta = 0.5;
    for (int it = 0; it < 100000 && res > target; ++it, ++iters) {
      const double pt = all_active_price(scenario, x);
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        ExtendedCost ec{&scenario.costs[i], scenario.lipschitz_k};
        double t = (pt + (nn + gbar - 1.0) * ec.deriv(pt - x[i])) / (nn + gbar);
        next[i] = (1.0 - eta) * x[i] + eta * t;
      }
      double next_res = inf_norm(all_active_foc(scenario, next));
      if (next_res > res) {
        eta *= 0.5;
        if (eta < 1e-6) break;
        continue;
      }
      x = std::move(next);
      res = next_res;
    }
  }
  if (res > 1e-10 * scale)
    throw NewtonDivergence("all-active solver failed to reach the residual target");

  for (double& xi : x) xi = std::clamp(xi, 0.0, scenario.p_hat());
  return make_result(scenario, std::move(x), SolveMethod::AllActive, iters, res);
}

EquilibriumResult solve_quadratic_closed_form(const Scenario& scenario) {
  if (!scenario.demand.is_affine()) throw NotAffine("closed form needs affine demand");
  if (!scenario.all_quadratic()) throw NotQuadratic("closed form needs quadratic costs");
  const double b = scenario.common_b();
  const double gamma = scenario.demand.gamma();
  const double p_hat = scenario.p_hat();
  const double k = scenario.lipschitz_k;
  const std::size_t n = scenario.n();
  const double nn = static_cast<double>(n);

  std::vector<double> d(n), a(n);
  double delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ci = scenario.costs[i].c();
    d[i] = (k * (nn - 1.0) + gamma) /
           (k * ci * (nn - 1.0) + ci * gamma + nn + gamma / k);
    a[i] = (k - d[i]) / (k * nn + gamma);
    delta += d[i];
  }
  const double p_star = (p_hat * gamma + b * delta) / (gamma + delta);

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (nn + gamma / k) * p_star * a[i] + (b / k) * d[i];
    x[i] = std::clamp(x[i], 0.0, p_hat);
  }
  double res = inf_norm(all_active_foc(scenario, x));
  return make_result(scenario, std::move(x), SolveMethod::ClosedForm, 0, res);
}

LimitResult limit_equilibrium(const Scenario& scenario) {
  if (!scenario.demand.is_affine()) throw NotAffine("limit needs affine demand");
  if (!scenario.all_quadratic()) throw NotQuadratic("limit needs quadratic costs");
  const double b = scenario.common_b();
  const double gamma = scenario.demand.gamma();
  const double p_hat = scenario.p_hat();
  double inv_sum = 0.0;
  for (const auto& c : scenario.costs) inv_sum += 1.0 / c.c();

  LimitResult r;
  r.p_infinity = (p_hat * gamma + b * inv_sum) / (gamma + inv_sum);
  const double spread = std::max(0.0, p_hat - b);
  const double denom = gamma + inv_sum;
  r.quantities_infinity.resize(scenario.n());
  r.utilities_infinity.resize(scenario.n());
  for (std::size_t i = 0; i < scenario.n(); ++i) {
    double ci = scenario.costs[i].c();
    r.quantities_infinity[i] = (gamma / ci) / denom * spread;
    r.utilities_infinity[i] = gamma * gamma / (2.0 * ci * denom * denom) * spread * spread;
  }
  return r;
}

std::pair<Scenario, ActivationProfile> rescale(const Scenario& scenario,
                                               const ActivationProfile& x,
                                               double to_k) {
  if (!(to_k > 0.0)) throw InvalidModel("target Lipschitz constant must be positive");
  if (to_k == scenario.lipschitz_k) return {scenario, x};
  const double from_k = scenario.lipschitz_k;
  std::vector<CostModel> costs;
  costs.reserve(scenario.n());
  for (const auto& c : scenario.costs) {
    CostModel unit = c.normalized(from_k);
    if (unit.is_quadratic()) {
      costs.push_back(CostModel::quadratic(unit.b(), unit.c() / to_k));
    } else {
      costs.push_back(CostModel::general(
          [unit, to_k](double q) { return to_k * unit.eval(q / to_k); },
          [unit, to_k](double q) { return unit.deriv(q / to_k); },
          [unit, to_k](double q) { return unit.second_deriv(q / to_k) / to_k; }));
    }
  }
  Scenario out(std::move(costs), scenario.demand.scaled(to_k / from_k), to_k);
  return {std::move(out), x};
}

NashReport verify_nash(const Scenario& scenario, const ActivationProfile& x,
                       double epsilon) {
  check_profile(scenario, x);
  if (!(epsilon > 0.0)) throw InvalidModel("epsilon must be positive");
  NashReport report;
  report.epsilon = epsilon;
  report.per_producer_gain.resize(scenario.n());
  report.best_deviation.resize(scenario.n());
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scenario.n(); ++i) {
    auto br = best_response(scenario, i, drop_index(x.x, i));
    double gain = br.utility_at_max - pab_utility(scenario, x, i);
    report.per_producer_gain[i] = gain;
    report.best_deviation[i] = br.maximizer;
    worst = std::max(worst, gain);
  }
  report.worst_gain = worst;
  report.is_epsilon_nash = worst <= epsilon;
  return report;
}

std::vector<KSweepRow> k_sweep(const Scenario& scenario,
                               const std::vector<double>& k_values) {
  if (k_values.empty()) throw InvalidModel("k sweep needs at least one K value");
  for (std::size_t j = 0; j < k_values.size(); ++j) {
    if (!(k_values[j] > 0.0)) throw InvalidModel("k values must be positive");
    if (j > 0 && k_values[j] < k_values[j - 1])
      throw InvalidModel("k values must be sorted ascending");
  }
  std::vector<KSweepRow> rows;
  rows.reserve(k_values.size() + 1);
  for (double k : k_values) {
    EquilibriumResult r = solve_quadratic_closed_form(scenario.with_k(k));
    rows.push_back(KSweepRow{k, r.p_star, r.x_star.x, r.quantities});
  }
  LimitResult lim = limit_equilibrium(scenario);
  KSweepRow limit_row;
  limit_row.k = std::numeric_limits<double>::infinity();
  limit_row.p_star = lim.p_infinity;
  limit_row.x_star.assign(scenario.n(), lim.p_infinity);
  limit_row.quantities = lim.quantities_infinity;
  rows.push_back(std::move(limit_row));
  return rows;
}

}  // namespace pab
