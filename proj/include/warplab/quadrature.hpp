#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace warplab::quad {

/// mantissa * e^{log_scale}; keeps integrals of e^{huge} * tiny representable.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  bool is_zero() const { return mantissa == 0.0; }
  double log() const { return mantissa > 0.0 ? std::log(mantissa) + log_scale : -std::numeric_limits<double>::infinity(); }
  double value() const { return mantissa == 0.0 ? 0.0 : mantissa * std::exp(log_scale); }
};

/// Ratio a/b evaluated in log form (0 if a is zero, +inf if only b is).
double ratio(const ScaledValue& a, const ScaledValue& b);

/// Integrand with K components sharing a log factor:
///   integrand_k(t) = e^{L(t)} g_k(t);  fn(t, L, g) fills L and g[0..K).
using Integrand = std::function<void(double t, double& L, double* g)>;

struct Options {
  double tol = 1e-10;        ///< relative to int |g_k| per component
  int initial_panels = 16;   ///< uniform panels per breakpoint interval
  int max_panels = 40000;
  int prescan_points = 1024; ///< samples used to pick the log reference
};

struct Result {
  std::vector<ScaledValue> values;
  std::vector<double> edges;   ///< final panel boundaries
  std::vector<double> log_refs;
  double error = 0.0;          ///< max_k estimated error / (tol * int|g_k|)
  bool converged = true;
  long evaluations = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b], split at the breakpoints.
/// Panels are refined until every component meets the tolerance; panel sums
/// are reduced pairwise in mesh order, so results are reproducible.
Result integrate(const Integrand& fn, std::size_t K, double a, double b, const std::vector<double>& breakpoints,
                 const Options& opt = {});

/// Kronrod sums on a fixed mesh with fixed log references (no adaptivity).
Result integrate_on_mesh(const Integrand& fn, std::size_t K, const std::vector<double>& edges,
                         const std::vector<double>& log_refs);

/// Halves every panel.
std::vector<double> refine_mesh(const std::vector<double>& edges);

/// Deterministic pairwise sum.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace warplab::quad
