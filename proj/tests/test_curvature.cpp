#include <doctest.h>

#include <cmath>
#include <numbers>

#include "warplab/curvature.hpp"
#include "warplab/errors.hpp"
#include "warplab/quadrature.hpp"

using namespace warplab;

TEST_CASE("kappa examples") {
  CHECK(kappa(CurvatureProfile::power_law(1.0, 0.0), 7.0) == 1.0);
  CHECK(kappa(CurvatureProfile::power_law(0.5, 2.0), 2.0) == doctest::Approx(1.0));
  CHECK(kappa(CurvatureProfile::flat(), 3.0) == 0.0);
  CHECK(kappa(CurvatureProfile::power_law(2.0, 1.0), 3.0) == doctest::Approx(12.0));
}

TEST_CASE("kappa is non-negative and continuous for every profile") {
  const CurvatureProfile profiles[] = {
      CurvatureProfile::flat(),
      CurvatureProfile::power_law(1.0, 0.0),
      CurvatureProfile::power_law(1.3, 2.5),
      CurvatureProfile::iterated_log(1.0, 0, 1.0),
      CurvatureProfile::iterated_log(1.0, 1, 2.0 * std::numbers::e),
      CurvatureProfile::iterated_log(0.5, 2, 2.0 * std::exp(std::numbers::e)),
      CurvatureProfile::tabulated({0.0, 1.0, 5.0}, {0.0, 2.0, 2.5}),
  };
  for (const auto& P : profiles) {
    CAPTURE(P.describe());
    double prev = P.kappa(0.0);
    for (double t = 1e-3; t <= 5.0; t += 1e-3) {
      const double k = P.kappa(t);
      CHECK(k >= 0.0);
      CHECK(std::abs(k - prev) < 0.05 * (1.0 + std::abs(k)));
      prev = k;
    }
  }
}

TEST_CASE("iterated-log profile is blended to a constant near the pole") {
  const auto P = CurvatureProfile::iterated_log(1.0, 1, 6.0);
  const double base = std::pow(lambda_profile(1.0, 1, 3.0), 2);
  CHECK(P.kappa(0.0) == doctest::Approx(base));
  CHECK(P.kappa(2.9) == doctest::Approx(base));
  CHECK(P.kappa(7.0) == doctest::Approx(std::pow(lambda_profile(1.0, 1, 7.0), 2)));
}

TEST_CASE("profile errors") {
  CHECK_THROWS_AS(CurvatureProfile::power_law(0.0, 1.0), ConfigurationError);
  CHECK_THROWS_AS(CurvatureProfile::power_law(1.0, -1.0), ConfigurationError);
  CHECK_THROWS_AS(CurvatureProfile::iterated_log(1.0, 1, 1.0), ConfigurationError);
  CHECK_THROWS_AS(CurvatureProfile::tabulated({0.0, 0.0}, {1.0, 1.0}), ConfigurationError);
  CHECK_THROWS_AS(CurvatureProfile::tabulated({0.0, 1.0}, {1.0, -1.0}), ConfigurationError);
  const auto T = CurvatureProfile::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
  CHECK(T.kappa(1.5) == doctest::Approx(2.5));
  CHECK_THROWS_AS(T.kappa(2.5), RangeError);
  CHECK_THROWS_AS(CurvatureProfile::flat().kappa(-1.0), DomainError);
}

TEST_CASE("lambda_profile examples") {
  CHECK(lambda_profile(1.0, 0, 10.0) == doctest::Approx(10.0));
  CHECK(lambda_profile(2.0, 1, std::numbers::e) == doctest::Approx(2.0 * std::numbers::e));
  CHECK_THROWS_AS(lambda_profile(1.0, 1, 2.0), DomainError);
  CHECK_THROWS_AS(lambda_profile(1.0, 2, 10.0), DomainError);
}

TEST_CASE("lambda_profile is increasing past the onset") {
  for (int k = 0; k <= 2; ++k) {
    const double t0 = std::max(1.0, iterated_log_onset(k));
    double prev = lambda_profile(1.0, k, t0);
    for (double t = t0 * 1.01; t < 1e4; t *= 1.01) {
      const double v = lambda_profile(1.0, k, t);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("reciprocal of lambda is not integrable") {
  // int_10^T dt / (t log t) = log log T - log log 10
  const auto L = LambdaScale::iterated_log(1.0, 1);
  const double T = 1e6;
  const double exact = std::log(std::log(T)) - std::log(std::log(10.0));
  CHECK(L.reciprocal_integral(10.0, T) == doctest::Approx(exact).epsilon(1e-12));
  const auto r = quad::integrate(
      [&](double t, double& Lg, double* g) {
        Lg = 0.0;
        g[0] = 1.0 / L.value(t);
      },
      1, 10.0, T, {100.0, 1e3, 1e4, 1e5}, {1e-12});
  CHECK(r.values[0].value() == doctest::Approx(exact).epsilon(1e-9));
  CHECK(L.reciprocal_integral(10.0, 1e300) > L.reciprocal_integral(10.0, 1e100));
}

TEST_CASE("lambda scale derivative and closed-form integral") {
  const LambdaScale scales[] = {LambdaScale::iterated_log(1.0, 0), LambdaScale::iterated_log(2.0, 1),
                                LambdaScale::iterated_log(1.0, 2), LambdaScale::power(1.5, 1.0),
                                LambdaScale::power(1.0, 2.0)};
  for (const auto& L : scales) {
    CAPTURE(L.describe());
    for (double t : {20.0, 50.0, 300.0}) {
      const double h = 1e-5 * t;
      CHECK(L.derivative(t) == doctest::Approx((L.value(t + h) - L.value(t - h)) / (2 * h)).epsilon(1e-7));
      const double a = 20.0;
      const auto r = quad::integrate(
          [&](double s, double& Lg, double* g) {
            Lg = 0.0;
            g[0] = 1.0 / L.value(s);
          },
          1, a, t, {}, {1e-12});
      CHECK(L.reciprocal_integral(a, t) == doctest::Approx(r.values[0].value()).epsilon(1e-10));
    }
  }
}

TEST_CASE("lambda scale from a profile") {
  CHECK(LambdaScale::from_profile(CurvatureProfile::power_law(2.0, 2.0)).value(3.0) == doctest::Approx(6.0));
  CHECK(LambdaScale::from_profile(CurvatureProfile::iterated_log(1.0, 0, 1.0)).value(3.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(LambdaScale::from_profile(CurvatureProfile::flat()), ConfigurationError);
  CHECK_THROWS_AS(LambdaScale::power(1.0, 0.0), ConfigurationError);
}

TEST_CASE("iterated_log") {
  CHECK(iterated_log(0, 5.0) == 5.0);
  CHECK(iterated_log(2, std::exp(std::exp(2.0))) == doctest::Approx(2.0));
  CHECK(iterated_log_onset(0) == 0.0);
  CHECK(iterated_log_onset(1) == doctest::Approx(std::numbers::e));
  CHECK_THROWS_AS(iterated_log(3, 2.0), DomainError);
}
