#include "warplab/fit.hpp"

#include <cmath>

#include "warplab/errors.hpp"

namespace warplab::fit {

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
  const std::size_t m = y.size(), k = columns.size();
  if (k == 0 || m < k) throw DomainError("least_squares: need at least as many samples as unknowns");
  std::vector<std::vector<double>> a = columns;
  std::vector<double> scale(k), b = y;
  for (std::size_t j = 0; j < k; ++j) {
    if (a[j].size() != m) throw DomainError("least_squares: column length mismatch");
    double nrm = 0.0;
    for (double v : a[j]) nrm += v * v;
    scale[j] = nrm > 0.0 ? 1.0 / std::sqrt(nrm) : 1.0;
    for (double& v : a[j]) v *= scale[j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    double nrm = 0.0;
    for (std::size_t i = j; i < m; ++i) nrm += a[j][i] * a[j][i];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-13) throw DomainError("least_squares: rank-deficient design");
    const double alpha = a[j][j] > 0.0 ? -nrm : nrm;
    std::vector<double> v(m, 0.0);
    for (std::size_t i = j; i < m; ++i) v[i] = a[j][i];
    v[j] -= alpha;
    double vv = 0.0;
    for (std::size_t i = j; i < m; ++i) vv += v[i] * v[i];
    auto reflect = [&](std::vector<double>& x) {
      double d = 0.0;
      for (std::size_t i = j; i < m; ++i) d += v[i] * x[i];
      d = 2.0 * d / vv;
      for (std::size_t i = j; i < m; ++i) x[i] -= d * v[i];
    };
    for (std::size_t c = j; c < k; ++c) reflect(a[c]);
    reflect(b);
  }
  std::vector<double> coef(k);
  for (std::size_t j = k; j-- > 0;) {
    double s = b[j];
    for (std::size_t c = j + 1; c < k; ++c) s -= a[c][j] * coef[c];
    coef[j] = s / a[j][j];
  }
  for (std::size_t j = 0; j < k; ++j) coef[j] *= scale[j];
  return coef;
}

Line linear(const std::vector<double>& x, const std::vector<double>& y) {
  const auto c = least_squares({x, std::vector<double>(x.size(), 1.0)}, y);
  return {c[0], c[1]};
}

double power_exponent(const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> lx(t.size()), ly(v.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(v[i] > 0.0)) throw DomainError("power_exponent: data must be positive");
    lx[i] = std::log(t[i]);
    ly[i] = std::log(v[i]);
  }
  return linear(lx, ly).slope;
}

}  // namespace warplab::fit
