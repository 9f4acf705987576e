#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace warplab::interp {

// Cubic Hermite on [t0, t1] from end values and end slopes.
inline double hermite_value(double t0, double t1, double x0, double x1, double d0, double d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * h * d1;
}

inline double hermite_derivative(double t0, double t1, double x0, double x1, double d0, double d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * (x0 - x1)) / h + (3 * s2 - 4 * s + 1) * d0 + (3 * s2 - 2 * s) * d1;
}

inline double hermite_second(double t0, double t1, double x0, double x1, double d0, double d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  return ((12 * s - 6) * (x0 - x1)) / (h * h) + ((6 * s - 4) * d0 + (6 * s - 2) * d1) / h;
}

// Exact integral of the Hermite cubic over its interval.
inline double hermite_integral(double t0, double t1, double x0, double x1, double d0, double d1) {
  const double h = t1 - t0;
  return 0.5 * h * (x0 + x1) + h * h * (d0 - d1) / 12.0;
}

// Index i with grid[i] <= t <= grid[i+1], clamped to the valid segment range.
inline std::size_t locate(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(i, grid.size() - 2);
}

}  // namespace warplab::interp
