#pragma once

#include <vector>

namespace warplab::fit {

/// Least-squares coefficients for y ~ sum_k c_k X[k] (columns), via
/// Householder QR on column-scaled data. Throws DomainError if rank deficient.
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& y);

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line linear(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log v against log t.
double power_exponent(const std::vector<double>& t, const std::vector<double>& v);

}  // namespace warplab::fit
