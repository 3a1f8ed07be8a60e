#pragma once

#include <vector>

namespace pab {

// Aggregate demand D(p) on [0, p_hat], strictly decreasing and concave with
// D(0) > 0 and D(p_hat) = 0. Two kinds are supported: affine
// D(p) = gamma*(p_hat - p), and a polynomial in p whose p_hat is derived as
// the smallest positive root of D.
class DemandModel {
 public:
  enum class Kind { Affine, Polynomial };

  static DemandModel affine(double gamma, double p_hat);
  // coeffs[k] multiplies p^k. Requires coeffs[0] = D(0) > 0; p_hat is located
  // by a scan-and-bisect from 0 with bracket expansion.
  static DemandModel polynomial(std::vector<double> coeffs);

  double operator()(double p) const { return eval(p); }
  double eval(double p) const;
  double deriv(double p) const;
  double second_deriv(double p) const;

  Kind kind() const { return kind_; }
  bool is_affine() const { return kind_ == Kind::Affine; }
  double p_hat() const { return p_hat_; }
  // Affine accessors; throw NotAffine otherwise.
  double gamma() const;

  const std::vector<double>& coeffs() const { return coeffs_; }

  // Equivalent demand scaled by 1/k (used by Scenario::normalized()).
  DemandModel scaled(double factor) const;

 private:
  DemandModel() = default;
  Kind kind_ = Kind::Affine;
  double gamma_ = 0.0;
  double p_hat_ = 0.0;
  std::vector<double> coeffs_;  // polynomial kind only
};

}  // namespace pab
