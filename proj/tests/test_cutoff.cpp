#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warplab/cutoff.hpp"
#include "warplab/errors.hpp"
#include "warplab/smoothstep.hpp"

using namespace warplab;

TEST_CASE("smoothstep suprema") {
  CHECK(sampled_sup([](double x) { return smoothstep_d1(x); }, 0.0, 1.0) == doctest::Approx(kSmoothstepSupD1));
  CHECK(sampled_sup([](double x) { return std::abs(smoothstep_d2(x)); }, 0.0, 1.0) ==
        doctest::Approx(kSmoothstepSupD2).epsilon(1e-12));
  CHECK(kSmoothstepSupD2 == doctest::Approx(10.0 / std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("sampled_sup finds interior maxima") {
  double at = 0.0;
  const double v = sampled_sup([](double x) { return -(x - 0.123456789) * (x - 0.123456789); }, -1.0, 1.0, 100, &at);
  CHECK(v == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(at == doctest::Approx(0.123456789).epsilon(1e-7));
}

TEST_CASE("hessian cutoff shape") {
  const double R = 10.0;
  const auto chi = make_hessian_cutoff(R, 100.0);
  CHECK(chi.value(0.5 * R) == 1.0);
  CHECK(chi.value(R) == 1.0);
  CHECK(chi.value(3.0 * R) == 0.0);
  CHECK(chi.value(2.0 * R) == 0.0);
  for (double t = 0.0; t <= 30.0; t += 0.01) {
    CHECK(chi.value(t) >= 0.0);
    CHECK(chi.value(t) <= 1.0);
    CHECK(chi.derivative(t) <= 0.0);
  }
  const double g = sampled_sup([&](double t) { return std::abs(chi.derivative(t)); }, R, 2 * R);
  const double h = sampled_sup([&](double t) { return std::abs(chi.second_derivative(t)); }, R, 2 * R);
  CHECK(g == doctest::Approx(1.875 / R).epsilon(1e-10));
  CHECK(h == doctest::Approx(5.7735026918962576 / (R * R)).epsilon(1e-10));
  CHECK_THROWS_AS(make_hessian_cutoff(60.0, 100.0), RangeError);
  CHECK_THROWS_AS(make_hessian_cutoff(0.0), ConfigurationError);
}

TEST_CASE("flat certificates are exactly scale invariant") {
  const auto M = build_model(3, CurvatureProfile::flat(), 300.0, 1e-10);
  std::vector<double> cert;
  for (double R : {4.0, 16.0, 64.0, 150.0}) {
    const auto c = certify_cutoff(M, make_hessian_cutoff(R), R, 2.0);
    CHECK(c.gradient_certificate == doctest::Approx(1.875).epsilon(1e-9));
    cert.push_back(c.sup_hessian * R * R);
    // direct grid oracle
    double direct = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double t = R + R * i / 20000.0;
      const Jet j = make_hessian_cutoff(R).jet(t);
      direct = std::max(direct, std::sqrt(j.d2f * j.d2f + 2.0 * std::pow(j.df / t, 2)));
    }
    CHECK(c.sup_hessian == doctest::Approx(direct).epsilon(1e-6));
    CHECK(c.sup_hessian >= direct);
  }
  for (double v : cert) CHECK(v == doctest::Approx(cert.front()).epsilon(1e-8));
}

TEST_CASE("hessian certificates are stable in R") {
  for (double beta : {0.0, 2.0}) {
    const auto M = build_model(3, CurvatureProfile::power_law(1.0, beta), 512.0, 1e-10);
    double lo = INFINITY, hi = 0.0;
    for (double R = 16.0; R <= 256.0; R *= 2.0) {
      const auto c = certify_cutoff(M, make_hessian_cutoff(R, M.t_max()), R, beta);
      lo = std::min(lo, c.hessian_certificate);
      hi = std::max(hi, c.hessian_certificate);
      CHECK(c.gradient_certificate == doctest::Approx(1.875).epsilon(1e-9));
    }
    CAPTURE(beta);
    CHECK(hi / lo < 2.0);
  }
}

TEST_CASE("laplacian cutoff for lambda = a t") {
  const auto M = build_model(3, CurvatureProfile::iterated_log(1.0, 0, 1.0), 130.0, 1e-10);
  for (double a : {1.0, 0.5}) {
    const auto L = LambdaScale::iterated_log(a, 0);
    const auto c = make_laplacian_cutoff(M, L, 8.0, 2.0);
    CHECK(c.H == doctest::Approx(std::log(2.0) / a).epsilon(1e-14));
    CHECK(c.chi.value(8.0) == 1.0);
    CHECK(c.chi.value(16.0) == 0.0);
    CHECK(c.chi.value(4.0) == 1.0);
    const double h = 1e-6;
    for (double t : {9.0, 12.0, 15.0}) {
      CHECK(c.chi.derivative(t) == doctest::Approx((c.chi.value(t + h) - c.chi.value(t - h)) / (2 * h)).epsilon(1e-6));
      CHECK(c.chi.second_derivative(t) ==
            doctest::Approx((c.chi.derivative(t + h) - c.chi.derivative(t - h)) / (2 * h)).epsilon(1e-5));
    }
  }
  double lo = INFINITY, hi = 0.0;
  for (double R = 8.0; R <= 64.0; R *= 2.0) {
    const auto c = make_laplacian_cutoff(M, LambdaScale::iterated_log(1.0, 0), R, 2.0);
    lo = std::min(lo, c.sup_laplacian);
    hi = std::max(hi, c.sup_laplacian);
    CHECK(c.sup_gradient_lambda <= 1.875 / std::log(2.0) * (1.0 + 1e-12));
    CHECK(c.sup_gradient_lambda >= 0.5 * 1.875 / std::log(2.0));
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("laplacian cutoff errors") {
  const auto M = build_model(3, CurvatureProfile::power_law(1.0, 2.0), 50.0, 1e-10);
  CHECK_THROWS_AS(make_laplacian_cutoff(M, 30.0, 2.0), RangeError);
  CHECK_THROWS_AS(make_laplacian_cutoff(M, 10.0, 1.0), ConfigurationError);
  CHECK_THROWS_AS(make_laplacian_cutoff(M, LambdaScale::iterated_log(1e9, 0), 10.0, 2.0), ConfigurationError);
  const auto F = build_model(3, CurvatureProfile::flat(), 50.0, 1e-10);
  CHECK_THROWS_AS(make_laplacian_cutoff(F, 10.0, 2.0), ConfigurationError);
}
