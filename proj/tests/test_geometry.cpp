#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warplab/errors.hpp"
#include "warplab/geometry.hpp"
#include "warplab/specfun.hpp"

using namespace warplab;

namespace {

struct LogjRow {
  double alpha, t, logj;
};

// j = Gamma(nu+1) (A nu)^{-nu} sqrt(t) I_nu(2 A nu t^{1/(2 nu)}), nu = 1/(alpha+2), A = 1 (mpmath)
constexpr LogjRow kLogj[] = {
    {1, 0.1, -2.302501761148758},  {1, 1, 0.081892977713534286},   {1, 5, 6.59805997205203},
    {1, 10, 20.046387531958989},   {1, 30, 108.2316554900244},     {2, 0.1, -2.3025800929996012},
    {2, 1, 0.049455573608300072},  {2, 5, 11.379046303777667},     {2, 10, 48.526538413624508},
    {2, 30, 447.97554668544951},
};

double bessel_logj(double A, double alpha, double t) {
  const double nu = 1.0 / (alpha + 2.0);
  return specfun::log_gamma(nu + 1.0) - nu * std::log(A * nu) + 0.5 * std::log(t) +
         specfun::log_bessel_i(nu, 2.0 * A * nu * std::pow(t, 0.5 / nu)).log_value;
}

}  // namespace

TEST_CASE("flat model is Euclidean") {
  const auto M = build_model(3, CurvatureProfile::flat(), 20.0, 1e-10);
  for (double t : {0.001, 0.5, 1.0, 7.0, 20.0}) {
    CAPTURE(t);
    CHECK(M.w(t) == doctest::Approx(1.0 / t).epsilon(1e-9));
    CHECK(M.logj(t) == doctest::Approx(std::log(t)).epsilon(1e-9).scale(1.0));
    CHECK(M.y(t) == doctest::Approx(t / 3.0).epsilon(1e-9));
  }
  CHECK(laplacian_distance(M, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(log_area(M, 1.0) == doctest::Approx(std::log(4.0 * std::numbers::pi)).epsilon(1e-9));
  const auto M2 = build_model(2, CurvatureProfile::flat(), 5.0, 1e-10);
  CHECK(log_area(M2, 2.0) == doctest::Approx(std::log(4.0 * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("constant curvature model is hyperbolic space") {
  const auto M = build_model(3, CurvatureProfile::power_law(1.0, 0.0), 30.0, 1e-10);
  for (double t = 0.1; t <= 30.0; t *= 1.07) {
    CAPTURE(t);
    CHECK(std::abs(M.w(t) * std::tanh(t) - 1.0) < 1e-9);
    CHECK(std::abs(M.logj(t) - std::log(std::sinh(t))) < 1e-9);
  }
  CHECK(log_area(M, 5.0) ==
        doctest::Approx(std::log(4.0 * std::numbers::pi) + 2.0 * std::log(std::sinh(5.0))).epsilon(1e-10));
  const auto M2 = build_model(2, CurvatureProfile::power_law(1.0, 0.0), 5.0, 1e-10);
  CHECK(laplacian_distance(M2, 1.0) == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-9));
}

TEST_CASE("power-law warping matches the Bessel form") {
  for (double alpha : {1.0, 2.0}) {
    const auto M = build_model(3, CurvatureProfile::power_law(1.0, alpha), 30.0, 1e-10);
    for (const auto& r : kLogj) {
      if (r.alpha != alpha) continue;
      CAPTURE(alpha);
      CAPTURE(r.t);
      CHECK(std::abs(M.logj(r.t) - r.logj) < 1e-8 * std::max(1.0, std::abs(r.logj)));
    }
    for (double t = 0.1; t <= 30.0; t *= 1.1) {
      CAPTURE(t);
      const double ref = bessel_logj(1.0, alpha, t);
      CHECK(std::abs(M.logj(t) - ref) < 1e-8 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("laplacian of distance tracks the curvature scale") {
  const auto M = build_model(2, CurvatureProfile::power_law(1.0, 2.0), 20.0, 1e-10);
  CHECK(std::abs(laplacian_distance(M, 20.0) / 20.0 - 1.0) < 0.02);
}

TEST_CASE("model invariants") {
  const CurvatureProfile profiles[] = {
      CurvatureProfile::flat(), CurvatureProfile::power_law(1.0, 0.0), CurvatureProfile::power_law(0.7, 1.5),
      CurvatureProfile::power_law(1.0, 4.0), CurvatureProfile::iterated_log(1.0, 1, 6.0),
      CurvatureProfile::tabulated({0.0, 2.0, 10.0, 40.0}, {0.0, 1.0, 0.5, 4.0})};
  for (const auto& P : profiles) {
    for (int n : {2, 3, 5}) {
      CAPTURE(P.describe());
      CAPTURE(n);
      const auto M = build_model(n, P, 40.0, 1e-10);
      const auto& t = M.nodes();
      CHECK(std::find(t.begin(), t.end(), 1.0) != t.end());
      double worst_identity = 0.0, worst_riccati = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(M.w_nodes()[i] > 0.0);
        CHECK(M.y_nodes()[i] > 0.0);
        CHECK(M.w_nodes()[i] >= (1.0 - 1e-9) / t[i]);
        CHECK(M.logj_nodes()[i] >= std::log(t[i]) - 1e-9);
        CHECK(M.y_nodes()[i] <= t[i] / n * (1.0 + 1e-9));
        if (i > 0) CHECK(M.logj_nodes()[i] > M.logj_nodes()[i - 1]);
        if (i + 1 < t.size()) {
          const double m = 0.5 * (t[i] + t[i + 1]);
          const double scale = std::max(1.0, M.kappa(m) + M.w(m) * M.w(m));
          worst_riccati = std::max(worst_riccati, std::abs(M.w_prime(m) - M.kappa(m) + M.w(m) * M.w(m)) / scale);
          worst_identity = std::max(worst_identity, std::abs(M.y_prime(m) + (n - 1) * M.w(m) * M.y(m) - 1.0));
        }
      }
      CHECK(worst_riccati < 1e-7);
      CHECK(worst_identity < 1e-7);
    }
  }
}

TEST_CASE("larger curvature gives larger w and smaller y") {
  const auto lo = build_model(3, CurvatureProfile::power_law(1.0, 1.0), 20.0, 1e-10);
  const auto hi = build_model(3, CurvatureProfile::power_law(2.0, 1.0), 20.0, 1e-10);
  for (double t = 0.01; t <= 20.0; t *= 1.2) {
    CAPTURE(t);
    CHECK(hi.w(t) >= lo.w(t));
    CHECK(hi.y(t) <= lo.y(t));
    CHECK(hi.logj(t) >= lo.logj(t));
  }
}

TEST_CASE("tabulated constant curvature agrees with the power law") {
  const auto T = build_model(3, CurvatureProfile::tabulated({0.0, 15.0}, {1.0, 1.0}), 15.0, 1e-10);
  for (double t : {0.3, 2.0, 14.0}) CHECK(std::abs(T.w(t) * std::tanh(t) - 1.0) < 1e-9);
}

TEST_CASE("explicit and implicit integrators agree") {
  const auto P = CurvatureProfile::power_law(1.0, 1.0);
  const auto a = build_model(3, P, 20.0, 1e-10, ode::Method::radau5);
  const auto b = build_model(3, P, 20.0, 1e-10, ode::Method::dopri5);
  for (double t = 0.05; t <= 20.0; t *= 1.3) {
    CAPTURE(t);
    CHECK(std::abs(a.logj(t) - b.logj(t)) < 1e-8 * std::max(1.0, std::abs(a.logj(t))));
    CHECK(a.w(t) == doctest::Approx(b.w(t)).epsilon(1e-8));
    CHECK(a.y(t) == doctest::Approx(b.y(t)).epsilon(1e-8));
  }
}

TEST_CASE("pole series below the first node") {
  const auto M = build_model(3, CurvatureProfile::power_law(1.0, 0.0), 5.0, 1e-10);
  CHECK(M.w(1e-8) == doctest::Approx(1e8));
  CHECK(M.y(1e-8) == doctest::Approx(1e-8 / 3.0));
}

TEST_CASE("model errors") {
  const auto P = CurvatureProfile::power_law(1.0, 1.0);
  CHECK_THROWS_AS(build_model(1, P, 10.0, 1e-10), ConfigurationError);
  CHECK_THROWS_AS(build_model(3, P, 1.0, 1e-10), ConfigurationError);
  CHECK_THROWS_AS(build_model(3, P, 10.0, 1e-3), ConfigurationError);
  CHECK_THROWS_AS(build_model(3, P, 10.0, 1e-15), ConfigurationError);
  const auto M = build_model(3, P, 10.0, 1e-10);
  CHECK_THROWS_AS(M.w(0.0), RangeError);
  CHECK_THROWS_AS(M.logj(10.5), RangeError);
  CHECK_THROWS_AS(M.y(-1.0), RangeError);
}
