#include "cbn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbn {

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summary of an empty sample");
  std::sort(values.begin(), values.end());
  return {values.front(), quantile_type7(values, 0.25), quantile_type7(values, 0.5),
          quantile_type7(values, 0.75), values.back()};
}

double upper_whisker(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("upper whisker of an empty sample");
  std::sort(values.begin(), values.end());
  const double q1 = quantile_type7(values, 0.25);
  const double q3 = quantile_type7(values, 0.75);
  const double fence = q3 + 1.5 * (q3 - q1);
  // q3 <= fence, so at least one value qualifies.
  return *(std::upper_bound(values.begin(), values.end(), fence) - 1);
}

}  // namespace cbn
