#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "iffm/errors.hpp"

namespace iffm {

/// Composite Simpson on a uniform grid with spacing h. An even number of
/// intervals is required; an odd count closes with a 3/8 panel.
inline double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  std::size_t intervals = n - 1;
  double tail = 0.0;
  if (intervals % 2 == 1) {
    const std::size_t k = n - 4;
    tail = 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    intervals -= 3;
  }
  double s = f[0] + f[intervals];
  for (std::size_t i = 1; i < intervals; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0 + tail;
}

/// Cumulative trapezoid, same length as f, starting at zero.
inline std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw Error(ErrorCode::InvalidArgument, "log grid needs 0 < min < max and at least 2 points");
  }
  std::vector<double> u(static_cast<std::size_t>(points));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < points; ++k) u[k] = std::pow(10.0, a + (b - a) * k / (points - 1));
  u.front() = lo;
  u.back() = hi;
  return u;
}

inline std::vector<double> linear_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw Error(ErrorCode::InvalidArgument, "linear grid needs 0 < min < max and at least 2 points");
  }
  std::vector<double> u(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) u[k] = lo + (hi - lo) * k / (points - 1);
  u.back() = hi;
  return u;
}

}  // namespace iffm
