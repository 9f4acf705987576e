#pragma once

namespace warplab::specfun {

/// Gamma function for x > 0 (Lanczos, g = 7, nine coefficients).
double gamma(double x);

/// Natural log of the gamma function for x > 0.
double log_gamma(double x);

/// Modified Bessel function of the first kind, I_nu(x), in log scale.
struct BesselEval {
  double nu = 0.0;
  double x = 0.0;
  double log_value = 0.0;  ///< log I_nu(x); -inf at x = 0
  double ratio = 0.0;      ///< I_nu'(x) / I_nu(x); +inf at x = 0
};

/// Largest argument evaluated with the power series; above it the
/// large-argument expansion takes over.
inline constexpr double kBesselSwitchover = 30.0;

/// log I_nu(x) and I_nu'/I_nu for nu in (0, 1], x >= 0.
BesselEval log_bessel_i(double nu, double x);

/// Power-series branch only (any x >= 0). Exposed for the overlap test.
BesselEval log_bessel_i_series(double nu, double x);

/// Large-argument branch only (x > 0; accurate for x >~ 20).
BesselEval log_bessel_i_asymptotic(double nu, double x);

}  // namespace warplab::specfun
