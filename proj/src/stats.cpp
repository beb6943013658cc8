#include "voxenc/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>

#include "voxenc/errors.hpp"

namespace voxenc::stats {

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InputError("pearson: length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  const std::size_t n = a.size();
  if (n < 2) throw InputError("pearson: need at least 2 samples");

  // Deviations are taken from the first sample so constant inputs give
  // exactly zero variance.
  double da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    da += a[i] - a[0];
    db += b[i] - b[0];
  }
  da /= static_cast<double>(n);
  db /= static_cast<double>(n);

  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (a[i] - a[0]) - da;
    const double y = (b[i] - b[0]) - db;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Interval student_t_interval(std::span<const double> samples, double level) {
  const std::size_t n = samples.size();
  if (n < 2) throw InputError("confidence interval needs at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
  const double ref = samples.front();
  double shift = 0.0;
  for (double s : samples) shift += s - ref;
  const double mean = ref + shift / static_cast<double>(n);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  const double half = t * sd / std::sqrt(static_cast<double>(n));
  return {mean, mean - half, mean + half};
}

}  // namespace voxenc::stats
