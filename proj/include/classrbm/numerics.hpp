#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace classrbm {

inline double sigmoid(double t) {
  // Evaluate through exp of a non-positive argument only, so neither branch overflows.
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// log(1 + e^t), stable for |t| up to the full double range.
inline double softplus(double t) {
  if (t > 0.0) {
    return t + std::log1p(std::exp(-t));
  }
  return std::log1p(std::exp(t));
}

/// log(sum_i e^{v_i}) with max subtraction; -inf for an empty span.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  double max = values[0];
  for (double v : values) {
    if (v > max) max = v;
  }
  if (!std::isfinite(max)) {
    return max;  // all -inf, or a +/-inf dominates
  }
  double sum = 0.0;
  for (double v : values) {
    sum += std::exp(v - max);
  }
  return max + std::log(sum);
}

inline bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace classrbm
