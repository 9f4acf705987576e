#pragma once

#include <cstddef>
#include <vector>

#include "warplab/curvature.hpp"
#include "warplab/ode.hpp"

namespace warplab {

/// Start of the tabulation; below it queries use the series at the pole.
inline constexpr double kPoleStart = 1e-6;

/// Tabulated warping data of a model manifold [0, t_max] x_j S^{n-1}:
/// w = j'/j, log j and the volume ratio y = (int_0^t j^{n-1}) / j^{n-1}.
class ModelManifold {
 public:
  ModelManifold() = default;
  ModelManifold(int n, CurvatureProfile profile, double tol, ode::Method method, std::vector<double> t,
                std::vector<double> w, std::vector<double> logj, std::vector<double> y);

  int n() const noexcept { return n_; }
  const CurvatureProfile& profile() const noexcept { return profile_; }
  double tol() const noexcept { return tol_; }
  ode::Method method() const noexcept { return method_; }
  double t_min() const noexcept { return t_.front(); }
  double t_max() const noexcept { return t_.back(); }

  const std::vector<double>& nodes() const noexcept { return t_; }
  const std::vector<double>& w_nodes() const noexcept { return w_; }
  const std::vector<double>& logj_nodes() const noexcept { return logj_; }
  const std::vector<double>& y_nodes() const noexcept { return y_; }

  double kappa(double t) const { return profile_.kappa(t); }
  /// Interpolated values on (0, t_max]; RangeError outside.
  double w(double t) const;
  double logj(double t) const;
  double y(double t) const;
  /// Derivative of the w interpolant (differs from kappa - w^2 by the
  /// interpolation error only).
  double w_prime(double t) const;
  double y_prime(double t) const;

  /// log of int_0^t j^{n-1} (the volume of B_t divided by the sphere area).
  double log_ball_integral(double t) const;

 private:
  void check(double t) const;

  int n_ = 2;
  CurvatureProfile profile_;
  double tol_ = 1e-10;
  ode::Method method_ = ode::Method::radau5;
  std::vector<double> t_, w_, logj_, y_;
  std::vector<double> dw_, dy_;
};

/// Integrates the Riccati form of j'' = kappa j from the pole.
ModelManifold build_model(int n, const CurvatureProfile& profile, double t_max, double tol,
                          ode::Method method = ode::Method::radau5);

/// Delta r = (n - 1) w.
double laplacian_distance(const ModelManifold& M, double t);

/// log vol(dB_t) = (n - 1) log j + log |S^{n-1}|.
double log_area(const ModelManifold& M, double t);

/// log of the area of the unit (n-1)-sphere, 2 pi^{n/2} / Gamma(n/2).
double log_sphere_area(int n);

}  // namespace warplab
