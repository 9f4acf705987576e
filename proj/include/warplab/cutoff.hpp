#pragma once

#include <limits>

#include "warplab/curvature.hpp"
#include "warplab/geometry.hpp"
#include "warplab/radial.hpp"

namespace warplab {

/// chi_R(t) = S(2 - t/R): 1 on [0, R], 0 beyond 2R. RangeError if 2R > t_max.
RadialFunction make_hessian_cutoff(double R, double t_max = std::numeric_limits<double>::infinity());

struct CutoffCertificate {
  double R = 0.0;
  double beta = 0.0;
  double sup_gradient = 0.0;  ///< sup |chi'|
  double sup_hessian = 0.0;   ///< sup sqrt(chi''^2 + (n-1)(w chi')^2)
  double gradient_certificate = 0.0;  ///< sup_gradient * R
  double hessian_certificate = 0.0;   ///< sup_hessian * R^{1 - beta/2}
  double argmax_hessian = 0.0;
};

/// Suprema over the transition annulus of chi (its first and last kink).
CutoffCertificate certify_cutoff(const ModelManifold& M, const RadialFunction& chi, double R, double beta);

struct LaplacianCutoff {
  RadialFunction chi;
  double R = 0.0;
  double gamma = 0.0;
  double H = 0.0;                 ///< int_R^{gamma R} ds / lambda
  double lambda_R = 0.0;
  double sup_gradient_lambda = 0.0;  ///< sup |chi'| * lambda(R)
  double sup_laplacian = 0.0;        ///< sup |chi'' + (n-1) w chi'|
};

/// chi(t) = S(1 - h(t)/H_R), h(t) = int_R^t ds / lambda. ConfigurationError
/// when H_R < 1e-6; RangeError when gamma R leaves the grid.
LaplacianCutoff make_laplacian_cutoff(const ModelManifold& M, const LambdaScale& lambda, double R, double gamma);
LaplacianCutoff make_laplacian_cutoff(const ModelManifold& M, double R, double gamma);

/// Max of f over [a, b]: dense sampling followed by golden-section polishing.
double sampled_sup(const std::function<double(double)>& f, double a, double b, int samples = 4000,
                   double* argmax = nullptr);

}  // namespace warplab
