#include "warplab/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "warplab/errors.hpp"
#include "warplab/smoothstep.hpp"

namespace warplab {

double sampled_sup(const std::function<double(double)>& f, double a, double b, int samples, double* argmax) {
  double best = -std::numeric_limits<double>::infinity(), at = a;
  for (int i = 0; i <= samples; ++i) {
    const double t = a + (b - a) * i / samples;
    const double v = f(t);
    if (v > best) {
      best = v;
      at = t;
    }
  }
  const double h = (b - a) / samples;
  double lo = std::max(a, at - h), hi = std::min(b, at + h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  for (double cand : {f1, f2})
    if (cand > best) {
      best = cand;
      at = cand == f1 ? x1 : x2;
    }
  if (argmax) *argmax = at;
  return best;
}

RadialFunction make_hessian_cutoff(double R, double t_max) {
  if (!(R > 0.0)) throw ConfigurationError("hessian cutoff: R must be positive");
  if (2.0 * R > t_max * (1.0 + 1e-14)) throw RangeError("hessian cutoff: 2R beyond the grid");
  auto eval = [R](double t) {
    const double x = 2.0 - t / R;
    return Jet{smoothstep(x), -smoothstep_d1(x) / R, smoothstep_d2(x) / (R * R), 0.0};
  };
  char label[64];
  std::snprintf(label, sizeof label, "hessian-cutoff[R=%.6g]", R);
  return RadialFunction(label, 0.0, 2.0 * R, eval, {R, 2.0 * R});
}

CutoffCertificate certify_cutoff(const ModelManifold& M, const RadialFunction& chi, double R, double beta) {
  CutoffCertificate c;
  c.R = R;
  c.beta = beta;
  if (chi.is_zero() || chi.kinks().size() < 2) return c;
  const double a = chi.kinks().front(), b = chi.kinks().back();
  if (b > M.t_max() * (1.0 + 1e-14)) throw RangeError("certify_cutoff: cutoff extends beyond the grid");
  const int n = M.n();
  c.sup_gradient = sampled_sup([&](double t) { return std::abs(chi.jet(t).df); }, a, b);
  c.sup_hessian = sampled_sup(
      [&](double t) { return jet_magnitude(chi.jet(t), Deriv::hessian, n, M.w(t)); }, a, b, 4000, &c.argmax_hessian);
  c.gradient_certificate = c.sup_gradient * R;
  c.hessian_certificate = c.sup_hessian * std::pow(R, 1.0 - 0.5 * beta);
  return c;
}

LaplacianCutoff make_laplacian_cutoff(const ModelManifold& M, const LambdaScale& lambda, double R, double gamma) {
  if (!(gamma > 1.0)) throw ConfigurationError("laplacian cutoff: gamma must exceed 1");
  if (!(R > 0.0)) throw ConfigurationError("laplacian cutoff: R must be positive");
  if (gamma * R > M.t_max() * (1.0 + 1e-14)) throw RangeError("laplacian cutoff: gamma R beyond the grid");
  LaplacianCutoff out;
  out.R = R;
  out.gamma = gamma;
  out.H = lambda.reciprocal_integral(R, gamma * R);
  if (!(out.H >= 1e-6)) throw ConfigurationError("laplacian cutoff: H_R below 1e-6 (profile too strong for this gamma)");
  out.lambda_R = lambda.value(R);
  const double H = out.H;
  auto eval = [lambda, R, H, gamma](double t) {
    if (t <= R) return Jet{1.0, 0.0, 0.0, 0.0};
    if (t >= gamma * R) return Jet{};
    const double x = 1.0 - lambda.reciprocal_integral(R, t) / H;
    const double lam = lambda.value(t), dlam = lambda.derivative(t);
    const double s1 = smoothstep_d1(x), s2 = smoothstep_d2(x);
    return Jet{smoothstep(x), -s1 / (lam * H), s2 / (lam * H * lam * H) + s1 * dlam / (lam * lam * H), 0.0};
  };
  char label[96];
  std::snprintf(label, sizeof label, "laplacian-cutoff[R=%.6g,gamma=%.6g]", R, gamma);
  out.chi = RadialFunction(label, 0.0, gamma * R, eval, {R, gamma * R});
  const int n = M.n();
  const auto& chi = out.chi;
  out.sup_gradient_lambda =
      sampled_sup([&](double t) { return std::abs(chi.jet(t).df); }, R, gamma * R) * out.lambda_R;
  out.sup_laplacian =
      sampled_sup([&](double t) { return jet_magnitude(chi.jet(t), Deriv::laplacian, n, M.w(t)); }, R, gamma * R);
  return out;
}

LaplacianCutoff make_laplacian_cutoff(const ModelManifold& M, double R, double gamma) {
  return make_laplacian_cutoff(M, LambdaScale::from_profile(M.profile()), R, gamma);
}

}  // namespace warplab
