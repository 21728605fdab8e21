#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace tropskel {

// log(sum exp(x_i)) without overflow; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace tropskel
