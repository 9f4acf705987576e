#include "warplab/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "warplab/errors.hpp"

namespace warplab::specfun {

namespace {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log(double x) {
  // log Gamma(x + 1) for x >= -0.5
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  const double t = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

void check_args(double nu, double x) {
  if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("log_bessel_i: order must lie in (0, 1]");
  if (!(x >= 0.0)) throw DomainError("log_bessel_i: argument must be non-negative");
}

// log of sum_k (x^2/4)^k / (k! (nu+1)_k), rescaled to avoid overflow.
double log_series_sum(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  double log_offset = 0.0;
  for (int k = 1; k < 100000; ++k) {
    term *= q / (static_cast<double>(k) * (static_cast<double>(k) + nu));
    sum += term;
    if (sum > 1e250) {
      sum *= 1e-250;
      term *= 1e-250;
      log_offset += 250.0 * std::numbers::ln10;
    }
    if (k > 0.5 * x && term < 1e-17 * sum) break;
  }
  return std::log(sum) + log_offset;
}

// sum_k (-1)^k a_k(nu) / x^k of the large-argument expansion, truncated at
// the smallest term.
double asymptotic_sum(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (next == 0.0 || std::abs(next) >= prev) break;
    prev = std::abs(next);
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log(-x);
  }
  return lanczos_log(x - 1.0);
}

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
  const double y = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (y + static_cast<double>(i));
  const double t = y + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, y + 0.5) * std::exp(-t) * a;
}

BesselEval log_bessel_i_series(double nu, double x) {
  check_args(nu, x);
  BesselEval out{nu, x, 0.0, 0.0};
  if (x == 0.0) {
    out.log_value = -std::numeric_limits<double>::infinity();
    out.ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  const double s_nu = log_series_sum(nu, x);
  const double s_nu1 = log_series_sum(nu + 1.0, x);
  out.log_value = nu * std::log(0.5 * x) - log_gamma(nu + 1.0) + s_nu;
  // I_nu' = I_{nu+1} + (nu/x) I_nu
  out.ratio = nu / x + 0.5 * x / (nu + 1.0) * std::exp(s_nu1 - s_nu);
  return out;
}

BesselEval log_bessel_i_asymptotic(double nu, double x) {
  check_args(nu, x);
  if (x == 0.0) throw DomainError("log_bessel_i_asymptotic: argument must be positive");
  BesselEval out{nu, x, 0.0, 0.0};
  const double s_nu = asymptotic_sum(nu, x);
  const double s_nu1 = asymptotic_sum(nu + 1.0, x);
  out.log_value = x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(s_nu);
  out.ratio = nu / x + s_nu1 / s_nu;
  return out;
}

BesselEval log_bessel_i(double nu, double x) {
  check_args(nu, x);
  return x <= kBesselSwitchover ? log_bessel_i_series(nu, x) : log_bessel_i_asymptotic(nu, x);
}

}  // namespace warplab::specfun
