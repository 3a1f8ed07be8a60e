#include "pab/supply.hpp"

#include <algorithm>
#include <cmath>

#include "pab/errors.hpp"

namespace pab {

SampledSupply::SampledSupply(std::vector<double> breakpoints,
                             std::vector<double> values)
    : prices_(std::move(breakpoints)), quantities_(std::move(values)) {
  if (prices_.size() < 2 || prices_.size() != quantities_.size())
    throw InvalidModel("sampled supply needs matching breakpoint/value lists");
  if (prices_.front() != 0.0)
    throw InvalidModel("sampled supply must start at price 0");
  if (quantities_.front() != 0.0)
    throw InvalidModel("sampled supply must have value 0 at price 0");
  for (std::size_t k = 1; k < prices_.size(); ++k) {
    if (!(prices_[k] > prices_[k - 1]))
      throw InvalidModel("sampled supply breakpoints must strictly increase");
    if (quantities_[k] < quantities_[k - 1])
      throw InvalidModel("sampled supply values must be nondecreasing");
  }
}

double SampledSupply::value(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= prices_.back()) return quantities_.back();
  auto it = std::upper_bound(prices_.begin(), prices_.end(), p);
  std::size_t k = static_cast<std::size_t>(it - prices_.begin()) - 1;
  double t = (p - prices_[k]) / (prices_[k + 1] - prices_[k]);
  return quantities_[k] + t * (quantities_[k + 1] - quantities_[k]);
}

double SampledSupply::integral_to(double p) const {
  if (p <= 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < prices_.size(); ++k) {
    double lo = prices_[k], hi = prices_[k + 1];
    if (p <= lo) break;
    double upper = std::min(p, hi);
    double v_lo = quantities_[k];
    double v_up = value(upper);
    total += 0.5 * (v_lo + v_up) * (upper - lo);
  }
  if (p > prices_.back()) total += quantities_.back() * (p - prices_.back());
  return total;
}

double SampledSupply::max_slope() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < prices_.size(); ++k) {
    m = std::max(m, (quantities_[k + 1] - quantities_[k]) /
                        (prices_[k + 1] - prices_[k]));
  }
  return m;
}

bool SampledSupply::lipschitz_check(double k, double rel_slack) const {
  return max_slope() <= k * (1.0 + rel_slack);
}

SampledSupply SampledSupply::ramp(double x, double k, double p_hat) {
  if (!(p_hat > 0.0)) throw InvalidModel("ramp requires p_hat > 0");
  if (x < 0.0 || x > p_hat) throw InvalidModel("ramp activation price outside [0, p_hat]");
  if (x <= 0.0) return SampledSupply({0.0, p_hat}, {0.0, k * p_hat});
  if (x >= p_hat) return SampledSupply({0.0, p_hat}, {0.0, 0.0});
  return SampledSupply({0.0, x, p_hat}, {0.0, 0.0, k * (p_hat - x)});
}

}  // namespace pab
