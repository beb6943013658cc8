#pragma once

#include <optional>
#include <span>

namespace voxenc::stats {

/// Pearson correlation. Empty when either input has zero variance; throws
/// InputError on length mismatch or fewer than two samples.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Two-sided Student-t confidence interval of the mean with n-1 degrees of
/// freedom. Requires at least two samples and 0 < level < 1.
Interval student_t_interval(std::span<const double> samples, double level);

}  // namespace voxenc::stats
