#pragma once

#include <span>
#include <vector>

namespace cbn {

/// Sample quantile by linear interpolation between order statistics at
/// position 1 + (n - 1) p (Hyndman-Fan type 7). `sorted` must be nondecreasing.
double quantile_type7(std::span<const double> sorted, double p);

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumberSummary five_number_summary(std::vector<double> values);

/// Largest value not exceeding Q3 + 1.5 IQR (the boxplot upper whisker).
double upper_whisker(std::vector<double> values);

}  // namespace cbn
