#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "warplab/errors.hpp"
#include "warplab/ode.hpp"

using namespace warplab;

namespace {

// y' = -L (y - cos t) - sin t, y(0) = 1 + c: y = cos t + c e^{-L t}
struct Prothero {
  double L;
  void rhs(double t, const ode::State<1>& x, ode::State<1>& dx) const { dx[0] = -L * (x[0] - std::cos(t)) - std::sin(t); }
  void jacobian(double, const ode::State<1>&, ode::Matrix<1>& J) const { J[0][0] = -L; }
  bool admissible(double, const ode::State<1>&) const { return true; }
};

// harmonic oscillator
struct Oscillator {
  void rhs(double, const ode::State<2>& x, ode::State<2>& dx) const {
    dx[0] = x[1];
    dx[1] = -x[0];
  }
  void jacobian(double, const ode::State<2>&, ode::Matrix<2>& J) const { J = {{{0.0, 1.0}, {-1.0, 0.0}}}; }
  bool admissible(double, const ode::State<2>&) const { return true; }
};

// y' = y^2, y(0) = 1 blows up at t = 1
struct Blowup {
  void rhs(double, const ode::State<1>& x, ode::State<1>& dx) const { dx[0] = x[0] * x[0]; }
  void jacobian(double, const ode::State<1>& x, ode::Matrix<1>& J) const { J[0][0] = 2.0 * x[0]; }
  bool admissible(double, const ode::State<1>& x) const { return std::isfinite(x[0]); }
};

// y' = sign(t - 0.5): kink at 0.5
struct Kink {
  void rhs(double t, const ode::State<1>&, ode::State<1>& dx) const { dx[0] = t < 0.5 ? -1.0 : 1.0; }
  void jacobian(double, const ode::State<1>&, ode::Matrix<1>& J) const { J[0][0] = 0.0; }
  bool admissible(double, const ode::State<1>&) const { return true; }
};

}  // namespace

TEST_CASE("both methods integrate a smooth system to tolerance") {
  for (auto m : {ode::Method::radau5, ode::Method::dopri5}) {
    CAPTURE(ode::method_name(m));
    ode::Control<2> ctl;
    ctl.tol = 1e-10;
    ctl.floor = {1.0, 1.0};
    const auto tr = ode::integrate<2>(Oscillator{}, 0.0, {0.0, 1.0}, 10.0, ctl, m);
    CHECK(tr.t.back() == 10.0);
    CHECK(std::abs(tr.x.back()[0] - std::sin(10.0)) < 1e-8);
    double worst = 0.0;
    for (double t = 0.01; t < 10.0; t += 0.0137) worst = std::max(worst, std::abs(tr.value(0, t) - std::sin(t)));
    CHECK(worst < 1e-8);
    CHECK(std::abs(tr.derivative(0, 3.3) - std::cos(3.3)) < 1e-7);
  }
}

TEST_CASE("radau handles stiffness with few steps") {
  ode::Control<1> ctl;
  ctl.tol = 1e-9;
  ctl.floor = {1.0};
  const Prothero sys{1e6};
  const auto tr = ode::integrate<1>(sys, 0.0, {1.5}, 10.0, ctl, ode::Method::radau5);
  CHECK(std::abs(tr.x.back()[0] - std::cos(10.0)) < 1e-8);
  CHECK(tr.accepted < 2000);
}

TEST_CASE("backward integration and make_increasing") {
  ode::Control<2> ctl;
  ctl.tol = 1e-10;
  ctl.floor = {1.0, 1.0};
  auto tr = ode::integrate<2>(Oscillator{}, 5.0, {std::sin(5.0), std::cos(5.0)}, 1.0, ctl);
  CHECK(tr.t.front() == 5.0);
  tr.make_increasing();
  CHECK(tr.t.front() == 1.0);
  for (std::size_t i = 1; i < tr.t.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
  CHECK(std::abs(tr.value(0, 2.5) - std::sin(2.5)) < 1e-8);
}

TEST_CASE("breakpoints are landed on exactly") {
  ode::Control<1> ctl;
  ctl.tol = 1e-12;
  ctl.floor = {1.0};
  ctl.breakpoints = {0.5};
  const auto tr = ode::integrate<1>(Kink{}, 0.0, {0.0}, 1.0, ctl);
  CHECK(std::find(tr.t.begin(), tr.t.end(), 0.5) != tr.t.end());
  CHECK(std::abs(tr.value(0, 0.75) + 0.25) < 1e-10);
  CHECK(std::abs(tr.x.back()[0]) < 1e-10);
}

TEST_CASE("finite-time blow-up raises IntegrationError") {
  ode::Control<1> ctl;
  ctl.floor = {1.0};
  for (auto m : {ode::Method::radau5, ode::Method::dopri5}) {
    try {
      (void)ode::integrate<1>(Blowup{}, 0.0, {1.0}, 2.0, ctl, m);
      FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
      CHECK(e.t() < 1.0);
      CHECK(e.t() > 0.9);
    }
  }
}
