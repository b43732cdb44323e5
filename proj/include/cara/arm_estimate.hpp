#pragma once
#include <cstddef>
#include <optional>

namespace cara {

// Running count, mean and Bessel-corrected variance of one arm's outcomes.
// Welford's recurrence; m2 is the running sum of squared deviations.
struct ArmEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  // Undefined until two observations have been seen.
  std::optional<double> variance() const {
    if (count < 2) return std::nullopt;
    return m2 / static_cast<double>(count - 1);
  }
  double variance_or_zero() const { return variance().value_or(0.0); }
};

inline ArmEstimate update_estimate(ArmEstimate est, double y) {
  ++est.count;
  const double delta = y - est.mean;
  est.mean += delta / static_cast<double>(est.count);
  est.m2 += delta * (y - est.mean);
  if (est.m2 < 0.0) est.m2 = 0.0;
  return est;
}

}  // namespace cara
