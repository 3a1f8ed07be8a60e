#pragma once

#include <functional>

namespace pab {

// Production cost C(q), twice differentiable, nondecreasing and convex.
// Quadratic kind is C(q) = b*q + c*q^2/2 with C(0) = 0; the general kind
// carries user-supplied callables for C, C' and C'' (no numerical
// differentiation is ever performed) and may have C(0) >= 0.
class CostModel {
 public:
  using Fn = std::function<double(double)>;

  static CostModel quadratic(double b, double c);
  static CostModel general(Fn c0, Fn c1, Fn c2);

  double operator()(double q) const { return eval(q); }
  double eval(double q) const;
  double deriv(double q) const;
  double second_deriv(double q) const;
  double marginal_at_zero() const { return deriv(0.0); }

  bool is_quadratic() const { return quadratic_; }
  // Quadratic accessors; throw NotQuadratic otherwise.
  double b() const;
  double c() const;

  // Cost of the equivalent unit-Lipschitz game: q -> C(k*q)/k.
  CostModel normalized(double k) const;

 private:
  CostModel() = default;
  bool quadratic_ = true;
  double b_ = 0.0, c_ = 0.0;
  Fn c0_, c1_, c2_;
};

}  // namespace pab
