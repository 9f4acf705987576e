#include <doctest.h>

#include <cmath>
#include <vector>

#include "warplab/quadrature.hpp"

using namespace warplab;

TEST_CASE("polynomials are integrated exactly") {
  const auto r = quad::integrate(
      [](double t, double& L, double* g) {
        L = 0.0;
        g[0] = std::pow(t, 5);
        g[1] = 1.0;
      },
      2, 0.0, 2.0, {});
  CHECK(r.converged);
  CHECK(r.values[0].value() == doctest::Approx(64.0 / 6.0).epsilon(1e-14));
  CHECK(r.values[1].value() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("shared log factor keeps huge integrals representable") {
  const auto r = quad::integrate(
      [](double t, double& L, double* g) {
        L = 1000.0 * t;
        g[0] = 1.0;
        g[1] = t;
      },
      2, 0.0, 1.0, {});
  CHECK(r.converged);
  CHECK(r.values[0].log() == doctest::Approx(1000.0 - std::log(1000.0)).epsilon(1e-12));
  CHECK(r.values[1].log() == doctest::Approx(1000.0 + std::log(1e-3 - 1e-6)).epsilon(1e-12));
  CHECK(quad::ratio(r.values[1], r.values[0]) == doctest::Approx(1.0 - 1e-3).epsilon(1e-10));
}

TEST_CASE("scaled value helpers") {
  const quad::ScaledValue zero{};
  const quad::ScaledValue one{1.0, 0.0};
  const quad::ScaledValue big{2.0, 800.0};
  CHECK(zero.is_zero());
  CHECK(std::isinf(zero.log()));
  CHECK(quad::ratio(zero, one) == 0.0);
  CHECK(std::isinf(quad::ratio(one, zero)));
  CHECK(quad::ratio(big, quad::ScaledValue{1.0, 799.0}) == doctest::Approx(2.0 * std::exp(1.0)));
}

TEST_CASE("breakpoints resolve kinks") {
  const auto r = quad::integrate(
      [](double t, double& L, double* g) {
        L = 0.0;
        g[0] = std::abs(t - 0.3);
      },
      1, 0.0, 1.0, {0.3});
  CHECK(r.values[0].value() == doctest::Approx(0.29).epsilon(1e-14));
}

TEST_CASE("smooth oscillatory integrand meets the tolerance") {
  const auto r = quad::integrate(
      [](double t, double& L, double* g) {
        L = 0.0;
        g[0] = std::sin(40.0 * t) * std::exp(-t);
      },
      1, 0.0, 5.0, {}, {1e-12});
  const double exact = (40.0 - std::exp(-5.0) * (std::sin(200.0) + 40.0 * std::cos(200.0))) / 1601.0;
  CHECK(std::abs(r.values[0].value() - exact) < 1e-12);
}

TEST_CASE("results are reproducible and stable under mesh refinement") {
  auto fn = [](double t, double& L, double* g) {
    L = 3.0 * t;
    g[0] = std::cos(t) * std::cos(t) + 0.1;
  };
  const auto a = quad::integrate(fn, 1, 0.0, 7.0, {1.0, 2.5});
  const auto b = quad::integrate(fn, 1, 0.0, 7.0, {1.0, 2.5});
  CHECK(a.values[0].mantissa == b.values[0].mantissa);
  CHECK(a.values[0].log_scale == b.values[0].log_scale);
  const auto fine = quad::integrate_on_mesh(fn, 1, quad::refine_mesh(a.edges), a.log_refs);
  CHECK(std::abs(quad::ratio(fine.values[0], a.values[0]) - 1.0) < 1e-12);
}

TEST_CASE("refine_mesh halves every panel") {
  const auto m = quad::refine_mesh({0.0, 1.0, 3.0});
  REQUIRE(m.size() == 5);
  CHECK(m[1] == 0.5);
  CHECK(m[3] == 2.0);
}

TEST_CASE("pairwise sum") {
  std::vector<double> x(1000000, 0.1);
  CHECK(quad::pairwise_sum(x.data(), x.size()) == doctest::Approx(100000.0).epsilon(1e-13));
  CHECK(quad::pairwise_sum(x.data(), 0) == 0.0);
}
