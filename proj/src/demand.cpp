#include "pab/demand.hpp"

#include <cmath>
#include <limits>

#include "pab/errors.hpp"

namespace pab {

namespace {

double poly_eval(const std::vector<double>& c, double p) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * p + c[k];
  return v;
}

std::vector<double> poly_deriv(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

// Smallest positive root of the polynomial, assuming value(0) > 0. Expands
// the bracket until the value goes nonpositive, then scans for the first
// sign change and bisects it.
double smallest_positive_root(const std::vector<double>& c) {
  double hi = 1.0;
  int expansions = 0;
  while (poly_eval(c, hi) > 0.0) {
    hi *= 2.0;
    if (++expansions > 600) throw NoRoot("polynomial demand has no positive root");
  }
  const int scan = 1024;
  double lo = 0.0;
  double a = 0.0, b = hi;
  double fa = poly_eval(c, 0.0);
  for (int s = 1; s <= scan; ++s) {
    double p = hi * static_cast<double>(s) / scan;
    double fp = poly_eval(c, p);
    if (fp <= 0.0) {
      a = lo;
      b = p;
      break;
    }
    lo = p;
    fa = fp;
  }
  (void)fa;
  for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
    double mid = 0.5 * (a + b);
    if (poly_eval(c, mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  // Newton polish lands on the representable root when one exists.
  double root = 0.5 * (a + b);
  std::vector<double> d = poly_deriv(c);
  for (int it = 0; it < 4; ++it) {
    double dp = poly_eval(d, root);
    if (dp >= 0.0) break;
    double next = root - poly_eval(c, root) / dp;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    root = next;
  }
  return root;
}

}  // namespace

DemandModel DemandModel::affine(double gamma, double p_hat) {
  if (!(gamma > 0.0) || !(p_hat > 0.0))
    throw InvalidModel("affine demand requires gamma > 0 and p_hat > 0");
  DemandModel d;
  d.kind_ = Kind::Affine;
  d.gamma_ = gamma;
  d.p_hat_ = p_hat;
  return d;
}

DemandModel DemandModel::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty() || !(coeffs[0] > 0.0))
    throw InvalidModel("polynomial demand requires D(0) > 0");
  DemandModel d;
  d.kind_ = Kind::Polynomial;
  d.coeffs_ = std::move(coeffs);
  d.p_hat_ = smallest_positive_root(d.coeffs_);
  return d;
}

double DemandModel::eval(double p) const {
  if (kind_ == Kind::Affine) return gamma_ * (p_hat_ - p);
  return poly_eval(coeffs_, p);
}

double DemandModel::deriv(double p) const {
  if (kind_ == Kind::Affine) return -gamma_;
  return poly_eval(poly_deriv(coeffs_), p);
}

double DemandModel::second_deriv(double p) const {
  if (kind_ == Kind::Affine) return 0.0;
  return poly_eval(poly_deriv(poly_deriv(coeffs_)), p);
}

double DemandModel::gamma() const {
  if (kind_ != Kind::Affine) throw NotAffine("demand is not affine");
  return gamma_;
}

DemandModel DemandModel::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidModel("demand scale factor must be positive");
  DemandModel d = *this;
  if (kind_ == Kind::Affine) {
    d.gamma_ = gamma_ * factor;
  } else {
    for (double& c : d.coeffs_) c *= factor;
    // p_hat is a root of D, unchanged by scaling.
  }
  return d;
}

}  // namespace pab
