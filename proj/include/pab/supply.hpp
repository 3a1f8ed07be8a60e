#pragma once

#include <cstddef>
#include <vector>

namespace pab {

// Piecewise-linear supply function on [0, p_hat]: strictly increasing price
// breakpoints starting at 0 and ending at p_hat, nondecreasing nonnegative
// quantities with value 0 at price 0. Evaluation interpolates linearly;
// integrals are exact on segments. There is no implicit resampling anywhere:
// operations that combine supplies work on the union of breakpoints.
class SampledSupply {
 public:
  SampledSupply(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return prices_; }
  const std::vector<double>& values() const { return quantities_; }
  double p_hat() const { return prices_.back(); }

  double value(double p) const;
  // Exact integral of the interpolant over [0, p] (trapezoid per segment).
  double integral_to(double p) const;
  double max_slope() const;
  bool lipschitz_check(double k, double rel_slack = 1e-9) const;

  // The ramp k*[p - x]_+ sampled exactly.
  static SampledSupply ramp(double x, double k, double p_hat);

 private:
  std::vector<double> prices_;
  std::vector<double> quantities_;
};

}  // namespace pab
