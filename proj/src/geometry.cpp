#include "warplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warplab/errors.hpp"
#include "warplab/interp.hpp"
#include "warplab/specfun.hpp"

namespace warplab {

namespace {

// x = (w, log j, y)
struct RiccatiSystem {
  const CurvatureProfile& profile;
  double m;  // n - 1

  void rhs(double t, const ode::State<3>& x, ode::State<3>& dx) const {
    dx[0] = profile.kappa(t) - x[0] * x[0];
    dx[1] = x[0];
    dx[2] = 1.0 - m * x[0] * x[2];
  }
  void jacobian(double, const ode::State<3>& x, ode::Matrix<3>& J) const {
    J = {};
    J[0][0] = -2.0 * x[0];
    J[1][0] = 1.0;
    J[2][0] = -m * x[2];
    J[2][2] = -m * x[0];
  }
  bool admissible(double, const ode::State<3>& x) const { return x[0] > 0.0 && x[2] > 0.0; }
};

std::vector<double> kinks(const CurvatureProfile& profile) {
  if (const auto* p = std::get_if<Tabulated>(&profile.kind())) return p->t;
  if (const auto* p = std::get_if<IteratedLog>(&profile.kind())) return {0.5 * p->t_onset, p->t_onset};
  return {};
}

}  // namespace

ModelManifold::ModelManifold(int n, CurvatureProfile profile, double tol, ode::Method method, std::vector<double> t,
                             std::vector<double> w, std::vector<double> logj, std::vector<double> y)
    : n_(n),
      profile_(std::move(profile)),
      tol_(tol),
      method_(method),
      t_(std::move(t)),
      w_(std::move(w)),
      logj_(std::move(logj)),
      y_(std::move(y)) {
  if (t_.size() < 2 || w_.size() != t_.size() || logj_.size() != t_.size() || y_.size() != t_.size())
    throw ConstructionError("model: inconsistent node arrays");
  dw_.resize(t_.size());
  dy_.resize(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) {
    dw_[i] = profile_.kappa(t_[i]) - w_[i] * w_[i];
    dy_[i] = 1.0 - (n_ - 1) * w_[i] * y_[i];
  }
}

void ModelManifold::check(double t) const {
  if (!(t > 0.0) || t > t_.back() * (1.0 + 1e-14)) throw RangeError("model queried outside (0, t_max]");
}

double ModelManifold::w(double t) const {
  check(t);
  if (t < t_.front()) return 1.0 / t + profile_.kappa(0.0) * t / 3.0;
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_value(t_[i], t_[i + 1], w_[i], w_[i + 1], dw_[i], dw_[i + 1], t);
}

double ModelManifold::w_prime(double t) const {
  check(t);
  if (t < t_.front()) return -1.0 / (t * t) + profile_.kappa(0.0) / 3.0;
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_derivative(t_[i], t_[i + 1], w_[i], w_[i + 1], dw_[i], dw_[i + 1], t);
}

double ModelManifold::logj(double t) const {
  check(t);
  if (t < t_.front()) return std::log(t) + profile_.kappa(0.0) * t * t / 6.0;
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_value(t_[i], t_[i + 1], logj_[i], logj_[i + 1], w_[i], w_[i + 1], t);
}

double ModelManifold::y(double t) const {
  check(t);
  if (t < t_.front()) return t / n_;
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_value(t_[i], t_[i + 1], y_[i], y_[i + 1], dy_[i], dy_[i + 1], t);
}

double ModelManifold::y_prime(double t) const {
  check(t);
  if (t < t_.front()) return 1.0 / n_;
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_derivative(t_[i], t_[i + 1], y_[i], y_[i + 1], dy_[i], dy_[i + 1], t);
}

double ModelManifold::log_ball_integral(double t) const { return std::log(y(t)) + (n_ - 1) * logj(t); }

ModelManifold build_model(int n, const CurvatureProfile& profile, double t_max, double tol, ode::Method method) {
  if (n < 2) throw ConfigurationError("build_model: dimension must be >= 2");
  if (!(t_max > 1.0)) throw ConfigurationError("build_model: t_max must exceed 1");
  if (!(tol > 1e-14 && tol < 1e-4)) throw ConfigurationError("build_model: tol must lie in (1e-14, 1e-4)");

  const double t0 = kPoleStart;
  const double k0 = profile.kappa(t0);
  ode::State<3> x0{1.0 / t0 + k0 * t0 / 3.0, std::log(t0) + k0 * t0 * t0 / 6.0, t0 / n};
  ode::Control<3> ctl;
  ctl.tol = tol;
  ctl.floor = {0.0, 1.0, 0.0};
  ctl.h_init = 0.05 * t0;
  // t = 1 is always a node
  ctl.breakpoints = kinks(profile);
  ctl.breakpoints.push_back(1.0);
  std::sort(ctl.breakpoints.begin(), ctl.breakpoints.end());
  ctl.breakpoints.erase(std::unique(ctl.breakpoints.begin(), ctl.breakpoints.end()), ctl.breakpoints.end());

  RiccatiSystem sys{profile, static_cast<double>(n - 1)};
  auto traj = ode::integrate<3>(sys, t0, x0, t_max, ctl, method);

  std::vector<double> w(traj.t.size()), logj(traj.t.size()), y(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    w[i] = traj.x[i][0];
    logj[i] = traj.x[i][1];
    y[i] = traj.x[i][2];
  }
  return ModelManifold(n, profile, tol, method, std::move(traj.t), std::move(w), std::move(logj), std::move(y));
}

double laplacian_distance(const ModelManifold& M, double t) { return (M.n() - 1) * M.w(t); }

double log_sphere_area(int n) {
  const double h = 0.5 * n;
  return std::log(2.0) + h * std::log(std::numbers::pi) - specfun::log_gamma(h);
}

double log_area(const ModelManifold& M, double t) { return (M.n() - 1) * M.logj(t) + log_sphere_area(M.n()); }

}  // namespace warplab
