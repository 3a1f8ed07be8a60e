#include "pab/cost.hpp"

#include <utility>

#include "pab/errors.hpp"

namespace pab {

CostModel CostModel::quadratic(double b, double c) {
  if (b < 0.0 || !(c > 0.0))
    throw InvalidModel("quadratic cost requires b >= 0 and c > 0");
  CostModel m;
  m.quadratic_ = true;
  m.b_ = b;
  m.c_ = c;
  return m;
}

CostModel CostModel::general(Fn c0, Fn c1, Fn c2) {
  if (!c0 || !c1 || !c2)
    throw InvalidModel("general cost requires C, C' and C'' callables");
  CostModel m;
  m.quadratic_ = false;
  m.c0_ = std::move(c0);
  m.c1_ = std::move(c1);
  m.c2_ = std::move(c2);
  return m;
}

double CostModel::eval(double q) const {
  if (quadratic_) return b_ * q + 0.5 * c_ * q * q;
  return c0_(q);
}

double CostModel::deriv(double q) const {
  if (quadratic_) return b_ + c_ * q;
  return c1_(q);
}

double CostModel::second_deriv(double q) const {
  if (quadratic_) return c_;
  return c2_(q);
}

double CostModel::b() const {
  if (!quadratic_) throw NotQuadratic("cost is not quadratic");
  return b_;
}

double CostModel::c() const {
  if (!quadratic_) throw NotQuadratic("cost is not quadratic");
  return c_;
}

CostModel CostModel::normalized(double k) const {
  if (quadratic_) return quadratic(b_, c_ * k);  // (b Kq + c (Kq)^2/2)/K
  Fn f0 = c0_, f1 = c1_, f2 = c2_;
  return general([f0, k](double q) { return f0(k * q) / k; },
                 [f1, k](double q) { return f1(k * q); },
                 [f2, k](double q) { return f2(k * q) * k; });
}

}  // namespace pab
