#include "pab/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pab/errors.hpp"
#include "pab/market.hpp"

namespace pab {

namespace {

void require_normalized(const Scenario& s) {
  if (s.lipschitz_k != 1.0)
    throw InvalidModel("expected a normalized (K = 1) scenario");
}

void check_opponents(const Scenario& s, std::size_t i,
                     const std::vector<double>& x_minus_i) {
  if (i >= s.n() || x_minus_i.size() + 1 != s.n())
    throw InvalidProfile("x_minus_i has the wrong length");
  const double ph = s.p_hat();
  for (double xj : x_minus_i)
    if (!(xj >= 0.0) || !(xj <= ph)) throw InvalidProfile("opponent price outside [0, p_hat]");
}

double f_slope(const Scenario& norm, const std::vector<double>& x_minus_i, double w) {
  double count = 0.0;
  for (double xj : x_minus_i)
    if (xj < w) count += 1.0;
  return 1.0 + count - norm.demand.deriv(w);
}

// f^{-1}(z) with the threshold already known. Bisection is safe because f is
// strictly increasing with slope > 1; a short Newton polish sharpens the root.
double phi_impl(const Scenario& norm, const std::vector<double>& x_minus_i,
                double z, double pi_hat) {
  double a = std::max(0.0, std::min(z, pi_hat));
  double b = pi_hat;
  auto f = [&](double w) { return f_eval(norm, 0, x_minus_i, w); };
  // f_eval ignores the index beyond bookkeeping; opponents are explicit.
  double fa = f(a) - z;
  if (fa > 0.0) return a;  // z at (or numerically past) the fixed point
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, pi_hat); ++it) {
    double mid = 0.5 * (a + b);
    if (f(mid) - z <= 0.0)
      a = mid;
    else
      b = mid;
  }
  double w = 0.5 * (a + b);
  for (int it = 0; it < 3; ++it) {
    double next = w - (f(w) - z) / f_slope(norm, x_minus_i, w);
    if (!(next >= a - 1e-12 && next <= b + 1e-12)) break;
    w = next;
  }
  return std::clamp(w, 0.0, pi_hat);
}

double uderiv_impl(const Scenario& norm, std::size_t i,
                   const std::vector<double>& x_minus_i, double z, double pi_hat) {
  double phi = phi_impl(norm, x_minus_i, z, pi_hat);
  double phip = 1.0 / f_slope(norm, x_minus_i, phi);
  double cprime = norm.costs[i].deriv(phi - z);
  return (phi - cprime) * (phip - 1.0) + phi - z;
}

}  // namespace

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::Plus: return "(+)";
    case SignClass::Minus: return "(-)";
    case SignClass::PlusZeroMinus: return "(+0-)";
    case SignClass::ZeroMinus: return "(0-)";
    case SignClass::PlusZero: return "(+0)";
  }
  return "?";
}

bool BreakpointPartition::matches_unimodal_pattern() const {
  // Accepts (+)* [single transition] (-)*: once any interval stops being
  // strictly (+), every later interval must be (-).
  bool in_tail = false;
  for (const auto& iv : intervals) {
    switch (iv.sign) {
      case SignClass::Plus:
        if (in_tail) return false;
        break;
      case SignClass::PlusZero:
      case SignClass::PlusZeroMinus:
      case SignClass::ZeroMinus:
        if (in_tail) return false;
        in_tail = true;
        break;
      case SignClass::Minus:
        in_tail = true;
        break;
    }
  }
  return true;
}

double f_eval(const Scenario& normalized, std::size_t i,
              const std::vector<double>& x_minus_i, double w) {
  require_normalized(normalized);
  (void)i;
  double acc = w - normalized.demand.eval(w);
  for (double xj : x_minus_i)
    if (xj < w) acc += w - xj;
  return acc;
}

double phi_eval(const Scenario& normalized, std::size_t i,
                const std::vector<double>& x_minus_i, double z) {
  require_normalized(normalized);
  check_opponents(normalized, i, x_minus_i);
  double pi_hat = threshold_price_excluding(normalized, i, x_minus_i);
  if (z > pi_hat + 1e-9 * std::max(1.0, normalized.p_hat()))
    throw OutOfRange("z exceeds the withdrawal threshold");
  if (z < 0.0) throw OutOfRange("z must be nonnegative");
  return phi_impl(normalized, x_minus_i, std::min(z, pi_hat), pi_hat);
}

double utility_derivative(const Scenario& normalized, std::size_t i,
                          const std::vector<double>& x_minus_i, double z) {
  require_normalized(normalized);
  check_opponents(normalized, i, x_minus_i);
  double pi_hat = threshold_price_excluding(normalized, i, x_minus_i);
  if (z > pi_hat + 1e-9 * std::max(1.0, normalized.p_hat()))
    throw OutOfRange("z exceeds the withdrawal threshold");
  return uderiv_impl(normalized, i, x_minus_i, z, pi_hat);
}

std::vector<double> drop_index(const std::vector<double>& x, std::size_t i) {
  std::vector<double> out;
  out.reserve(x.size() - 1);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (j != i) out.push_back(x[j]);
  return out;
}

BestResponseResult best_response(const Scenario& scenario, std::size_t i,
                                 const std::vector<double>& x_minus_i) {
  check_opponents(scenario, i, x_minus_i);
  const Scenario norm = scenario.normalized();
  const double p_hat = norm.p_hat();
  const double pi_hat = threshold_price_excluding(norm, i, x_minus_i);

  BestResponseResult res;
  res.threshold = pi_hat;
  res.is_plateau = norm.costs[i].marginal_at_zero() >= pi_hat;

  // Breakpoints of z -> clearing price: images f(x_j) of opponent prices
  // below the threshold. Points closer than 1e-12 * p_hat are merged.
  std::vector<double> zs;
  zs.push_back(0.0);
  for (double xj : x_minus_i) {
    if (xj <= 0.0 || xj >= pi_hat) continue;
    double zj = f_eval(norm, i, x_minus_i, xj);
    if (zj > 0.0 && zj < pi_hat) zs.push_back(zj);
  }
  zs.push_back(pi_hat);
  std::sort(zs.begin(), zs.end());
  const double merge_tol = 1e-12 * std::max(1.0, p_hat);
  std::vector<double> pts;
  for (double z : zs)
    if (pts.empty() || z - pts.back() > merge_tol) pts.push_back(z);
  if (pts.size() < 2) pts = {0.0, pi_hat};

  const double delta = 1e-9 * std::max(1.0, p_hat);
  const double zero_tol = 1e-9 * std::max(1.0, p_hat);
  auto uprime = [&](double z) { return uderiv_impl(norm, i, x_minus_i, z, pi_hat); };

  res.partition.intervals.clear();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    PartitionInterval iv;
    iv.lo = pts[k];
    iv.hi = pts[k + 1];
    double width = iv.hi - iv.lo;
    if (width < std::max(1e-10, 3.0 * delta)) {
      // Too narrow for one-sided probes: midpoint sign decides.
      double dm = uprime(0.5 * (iv.lo + iv.hi));
      iv.sign = (dm >= 0.0) ? SignClass::Plus : SignClass::Minus;
    } else {
      double d_lo = uprime(iv.lo + delta);
      double d_hi = uprime(iv.hi - delta);
      if (d_lo > zero_tol && d_hi > zero_tol)
        iv.sign = SignClass::Plus;
      else if (d_lo < -zero_tol && d_hi < -zero_tol)
        iv.sign = SignClass::Minus;
      else if (d_lo > zero_tol && d_hi < -zero_tol)
        iv.sign = SignClass::PlusZeroMinus;
      else if (std::abs(d_lo) <= zero_tol && d_hi < -zero_tol)
        iv.sign = SignClass::ZeroMinus;
      else if (d_lo > zero_tol && std::abs(d_hi) <= zero_tol)
        iv.sign = SignClass::PlusZero;
      else
        iv.sign = (d_lo + d_hi >= 0.0) ? SignClass::Plus : SignClass::Minus;
    }
    res.partition.intervals.push_back(iv);
  }

  // Locate the single + to - transition along the partition.
  double maximizer = pi_hat;
  bool found = false;
  for (std::size_t k = 0; k < res.partition.intervals.size() && !found; ++k) {
    const auto& iv = res.partition.intervals[k];
    switch (iv.sign) {
      case SignClass::Plus:
        break;
      case SignClass::PlusZero:
        maximizer = iv.hi;
        found = true;
        break;
      case SignClass::ZeroMinus:
      case SignClass::Minus:
        maximizer = iv.lo;  // transition at the shared breakpoint (0 if first)
        found = true;
        break;
      case SignClass::PlusZeroMinus: {
        // The derivative is strictly concave through its root, so the sign
        // brackets stay valid under bisection.
        double lo = iv.lo + delta, hi = iv.hi - delta;
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, p_hat); ++it) {
          double mid = 0.5 * (lo + hi);
          if (uprime(mid) > 0.0)
            lo = mid;
          else
            hi = mid;
        }
        maximizer = 0.5 * (lo + hi);
        found = true;
        break;
      }
    }
  }
  if (res.is_plateau) maximizer = pi_hat;
  res.maximizer = std::clamp(maximizer, 0.0, p_hat);

  std::vector<double> full(x_minus_i);
  full.insert(full.begin() + static_cast<std::ptrdiff_t>(i), res.maximizer);
  res.utility_at_max = pab_utility(scenario, ActivationProfile(std::move(full)), i);
  return res;
}

double best_response_grid_oracle(const Scenario& scenario, std::size_t i,
                                 const std::vector<double>& x_minus_i,
                                 std::size_t grid_n) {
  check_opponents(scenario, i, x_minus_i);
  if (grid_n < 2) grid_n = 2;
  const double p_hat = scenario.p_hat();
  double best_u = -std::numeric_limits<double>::infinity();
  double best_z = 0.0;
  std::vector<double> full(x_minus_i);
  full.insert(full.begin() + static_cast<std::ptrdiff_t>(i), 0.0);
  for (std::size_t s = 0; s < grid_n; ++s) {
    double z = std::min(
        p_hat, p_hat * (static_cast<double>(s) / static_cast<double>(grid_n - 1)));
    full[i] = z;
    double u = pab_utility(scenario, ActivationProfile(full), i);
    if (u > best_u) {  // strict: ties keep the smallest activation price
      best_u = u;
      best_z = z;
    }
  }
  return best_z;
}

}  // namespace pab
