#include "warplab/green.hpp"

#include <cmath>
#include <limits>

#include "warplab/errors.hpp"
#include "warplab/interp.hpp"
#include "warplab/ode.hpp"
#include "warplab/radial.hpp"

namespace warplab {

namespace {

struct RatioSystem {
  const ModelManifold& M;
  double c;
  void rhs(double t, const ode::State<1>& x, ode::State<1>& dx) const { dx[0] = -1.0 + c * M.w(t) * x[0]; }
  void jacobian(double t, const ode::State<1>&, ode::Matrix<1>& J) const { J[0][0] = c * M.w(t); }
  bool admissible(double, const ode::State<1>& x) const { return x[0] > 0.0; }
};

}  // namespace

GreenFunction::GreenFunction(std::shared_ptr<const ModelManifold> M, double p, double seed_t, std::vector<double> t,
                             std::vector<double> z)
    : M_(std::move(M)), p_(p), c_((M_->n() - 1) / (p - 1)), seed_t_(seed_t), t_(std::move(t)), z_(std::move(z)) {
  dz_.resize(t_.size());
  logG_.resize(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) {
    const double w = M_->w(t_[i]);
    dz_[i] = -1.0 + c_ * w * z_[i];
    logG_[i] = std::log(z_[i]) - c_ * M_->logj(t_[i]);
  }
  r_K_ = std::numeric_limits<double>::infinity();
  if (logG_.front() <= -1.0) {
    r_K_ = t_.front();
  } else if (logG_.back() <= -1.0) {
    double lo = t_.front(), hi = t_.back();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (logG(mid) > -1.0 ? lo : hi) = mid;
    }
    r_K_ = hi;
  }
}

void GreenFunction::check(double t) const {
  if (!(t >= t_.front() * (1.0 - 1e-14)) || t > t_.back() * (1.0 + 1e-14))
    throw RangeError("green function queried outside its grid");
}

double GreenFunction::z(double t) const {
  check(t);
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_value(t_[i], t_[i + 1], z_[i], z_[i + 1], dz_[i], dz_[i + 1], t);
}

double GreenFunction::z_prime(double t) const {
  check(t);
  const std::size_t i = interp::locate(t_, t);
  return interp::hermite_derivative(t_[i], t_[i + 1], z_[i], z_[i + 1], dz_[i], dz_[i + 1], t);
}

double GreenFunction::logG(double t) const { return std::log(z(t)) - c_ * M_->logj(t); }

GreenFunction build_green(std::shared_ptr<const ModelManifold> M, double p, double seed_t) {
  if (!(p > 1.0)) throw ConfigurationError("build_green: p must exceed 1");
  const int n = M->n();
  const double c = (n - 1) / (p - 1);
  const double T = seed_t > 0.0 ? seed_t : M->t_max();
  if (T <= M->t_min() || T > M->t_max()) throw RangeError("build_green: seed abscissa outside the grid");

  double z0;
  if (M->profile().is_flat()) {
    if (!(n > p)) throw ConstructionError("build_green: flat model is not p-hyperbolic for p >= n");
    z0 = T * (p - 1) / (n - p);
  } else {
    if (!(M->kappa(T) > 0.0))
      throw ConstructionError("build_green: curvature must be positive at the seed (p-hyperbolicity)");
    // quasi-static balance of z' = -1 + c w z
    const double w = M->w(T);
    const double wp = M->kappa(T) - w * w;
    z0 = 1.0 / (c * w) - wp / (c * c * w * w * w);
  }

  ode::Control<1> ctl;
  ctl.tol = M->tol();
  ctl.floor = {0.0};
  ctl.h_init = 1e-3 / (1.0 + c * M->w(T));
  // the coefficient w is a piecewise cubic: step across its nodes
  ctl.breakpoints = M->nodes();
  RatioSystem sys{*M, c};
  auto traj = ode::integrate<1>(sys, T, ode::State<1>{z0}, M->t_min(), ctl);
  traj.make_increasing();
  std::vector<double> z(traj.t.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = traj.x[i][0];
  return GreenFunction(std::move(M), p, T, std::move(traj.t), std::move(z));
}

GreenFunction build_green(const ModelManifold& M, double p, double seed_t) {
  return build_green(std::make_shared<const ModelManifold>(M), p, seed_t);
}

double hardy_weight(const GreenFunction& G, double beta, double t) {
  if (!(t >= G.r_K())) throw DomainError("hardy_weight: t below the admissible radius r_K");
  return std::pow(G.s(t), beta) / G.z(t);
}

double superharmonicity_residual(const GreenFunction& G) {
  const auto& t = G.nodes();
  const ModelManifold& M = G.model();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double tm = 0.5 * (t[i] + t[i + 1]);
    const double z = G.z(tm);
    const double zp = G.z_prime(tm);
    // jet of G normalized by G(tm): G'/G = -1/z, G''/G = (1 + z')/z^2
    const double d1 = -1.0 / z;
    const double d2 = (1.0 + zp) / (z * z);
    const double w = M.w(tm);
    const auto lap = radial_p_laplacian(M.n(), w, G.p(), d1, d2);
    if (!lap) continue;
    const double scale = std::pow(std::abs(d1), G.p() - 2.0) * std::abs(d1) * (M.n() - 1) * w;
    worst = std::max(worst, std::abs(*lap) / scale);
  }
  return worst;
}

}  // namespace warplab
