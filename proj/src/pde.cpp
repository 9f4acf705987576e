#include "warplab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "warplab/cutoff.hpp"
#include "warplab/errors.hpp"
#include "warplab/interp.hpp"

namespace warplab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double spacing(const ModelManifold& M, double t, const ExhaustionOptions& opt) {
  if (t <= 0.0) return opt.h_pole;
  const double h = opt.w_factor / ((M.n() - 1) * M.w(t));
  return std::max(opt.h_pole, std::min(opt.h_base, h));
}

std::vector<double> build_mesh(const ModelManifold& M, const std::vector<double>& radii, const ExhaustionOptions& opt,
                               std::vector<std::size_t>& ends) {
  std::vector<double> mesh{0.0};
  double start = 0.0;
  for (double R : radii) {
    std::vector<double> pts;
    double t = start;
    while (t < R) {
      t += spacing(M, t, opt);
      pts.push_back(t);
    }
    const double scale = (R - start) / (pts.back() - start);
    for (double& x : pts) x = start + (x - start) * scale;
    pts.back() = R;
    mesh.insert(mesh.end(), pts.begin(), pts.end());
    start = R;
    ends.push_back(mesh.size() - 1);
  }
  if (opt.refine > 1) {
    std::vector<double> fine{mesh.front()};
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
      for (int j = 1; j <= opt.refine; ++j)
        fine.push_back(j == opt.refine ? mesh[i + 1] : mesh[i] + (mesh[i + 1] - mesh[i]) * j / opt.refine);
    for (auto& e : ends) e *= static_cast<std::size_t>(opt.refine);
    mesh = std::move(fine);
  }
  return mesh;
}

// log int_a^b |S^{n-1}| j^{n-1} dt, four-point Gauss-Legendre in log form
double log_cell_volume(const ModelManifold& M, double a, double b, double log_sphere) {
  static const double x[4] = {-0.861136311594052575, -0.339981043584856265, 0.339981043584856265,
                              0.861136311594052575};
  static const double w[4] = {0.347854845137453857, 0.652145154862546143, 0.652145154862546143,
                              0.347854845137453857};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double L[4], ref = kNegInf;
  for (int i = 0; i < 4; ++i) {
    L[i] = (M.n() - 1) * M.logj(c + h * x[i]);
    ref = std::max(ref, L[i]);
  }
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += w[i] * std::exp(L[i] - ref);
  return log_sphere + ref + std::log(s * h);
}

struct Discretization {
  std::vector<double> log_volume;  // per node (cell [m_{i-1/2}, m_{i+1/2}], pole cell [0, m_{1/2}])
  std::vector<double> up;          // a_{i,i+1}
  std::vector<double> down;        // a_{i,i-1}
};

Discretization discretize(const ModelManifold& M, const std::vector<double>& mesh) {
  const std::size_t N = mesh.size();
  const double log_sphere = log_sphere_area(M.n());
  Discretization d;
  d.log_volume.assign(N, kNegInf);
  d.up.assign(N, 0.0);
  d.down.assign(N, 0.0);
  std::vector<double> mid(N - 1), log_flux(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    mid[i] = 0.5 * (mesh[i] + mesh[i + 1]);
    log_flux[i] = log_sphere + (M.n() - 1) * M.logj(mid[i]);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double a = i == 0 ? 0.0 : mid[i - 1];
    const double b = i + 1 < N ? mid[i] : mesh[i];
    if (b > a) d.log_volume[i] = log_cell_volume(M, a, b, log_sphere);
  }
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double lh = std::log(mesh[i + 1] - mesh[i]);
    d.up[i] = std::exp(log_flux[i] - d.log_volume[i] - lh);
    d.down[i + 1] = std::exp(log_flux[i] - d.log_volume[i + 1] - lh);
  }
  return d;
}

// Thomas algorithm on rows 0..e-1 with v_e = 0.
std::vector<double> solve_level(const Discretization& d, const std::vector<double>& psi, std::size_t e,
                                bool& m_matrix) {
  std::vector<double> diag(e), lower(e), upper(e), rhs(e);
  for (std::size_t i = 0; i < e; ++i) {
    const double dn = i == 0 ? 0.0 : d.down[i];
    lower[i] = -dn;
    upper[i] = -d.up[i];
    diag[i] = 1.0 + d.up[i] + dn;
    rhs[i] = psi[i];
    if (!(diag[i] > 0.0) || lower[i] > 0.0 || upper[i] > 0.0 || diag[i] < -lower[i] - upper[i]) m_matrix = false;
  }
  for (std::size_t i = 1; i < e; ++i) {
    const double f = lower[i] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  std::vector<double> v(e + 1, 0.0);
  for (std::size_t i = e; i-- > 0;) v[i] = (rhs[i] - (i + 1 < e ? upper[i] * v[i + 1] : 0.0)) / diag[i];
  return v;
}

double discrete_norm(const std::vector<double>& v, const std::vector<double>& log_volume, std::size_t e, double p) {
  double acc = kNegInf;
  for (std::size_t i = 0; i < e; ++i)
    if (v[i] != 0.0) acc = log_add(acc, p * std::log(std::abs(v[i])) + log_volume[i]);
  return acc == kNegInf ? 0.0 : std::exp(acc / p);
}

ExhaustionSolution solve_impl(const ModelManifold& M, const RadialFunction& psi, std::vector<double> radii,
                              std::vector<double> p_list, const ExhaustionOptions& opt) {
  if (radii.empty()) throw ConfigurationError("exhaustion: no radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1])))
      throw ConfigurationError("exhaustion: radii must be positive and increasing");
  }
  if (radii.back() > M.t_max() * (1.0 + 1e-14)) throw RangeError("exhaustion: radius beyond the grid");
  if (!psi.is_zero() && !opt.waive_support && psi.hi() > radii.front() * (1.0 + 1e-12))
    throw PreconditionError("exhaustion: psi must be supported inside the smallest ball");

  ExhaustionSolution sol;
  sol.radii = radii;
  sol.p_list = p_list;
  sol.mesh = build_mesh(M, radii, opt, sol.end_index);
  const auto d = discretize(M, sol.mesh);
  sol.log_volume = d.log_volume;
  const std::size_t N = sol.mesh.size();
  sol.psi.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double v = psi.value(sol.mesh[i]);
    if (v < 0.0) throw PreconditionError("exhaustion: psi must be non-negative");
    sol.psi[i] = v;
  }
  const std::size_t eK = sol.end_index.back();
  for (double p : p_list) sol.psi_norm_p.push_back(discrete_norm(sol.psi, d.log_volume, eK, p));
  sol.psi_norm_inf = *std::max_element(sol.psi.begin(), sol.psi.begin() + static_cast<std::ptrdiff_t>(eK));

  for (std::size_t k = 0; k < radii.size(); ++k) {
    const std::size_t e = sol.end_index[k];
    auto v = solve_level(d, sol.psi, e, sol.m_matrix);
    const double vmax = *std::max_element(v.begin(), v.end());
    const double vmin = *std::min_element(v.begin(), v.end());
    if (vmin < -1e-12 * std::max(vmax, 1e-300))
      throw SolverError("exhaustion: discrete maximum principle violated (mesh too coarse)");
    std::vector<double> norms;
    for (double p : p_list) norms.push_back(discrete_norm(v, d.log_volume, e, p));
    sol.norm_p.push_back(norms);
    sol.norm_inf.push_back(vmax);
    sol.v.push_back(std::move(v));
  }
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    const double scale = std::max(sol.norm_inf[k + 1], 1e-300);
    for (std::size_t i = 0; i <= sol.end_index[k]; ++i)
      sol.monotonicity_violation = std::max(sol.monotonicity_violation, (sol.v[k][i] - sol.v[k + 1][i]) / scale);
  }
  if (radii.size() >= 2) {
    const std::size_t K = radii.size() - 1;
    const double scale = std::max(sol.norm_inf[K], 1e-300);
    for (std::size_t i = 0; i <= sol.end_index[K - 1]; ++i)
      sol.limit_change = std::max(sol.limit_change, std::abs(sol.v[K][i] - sol.v[K - 1][i]) / scale);
    sol.converged = sol.limit_change < 1e-8 || sol.norm_inf[K] == 0.0;
  }
  return sol;
}

}  // namespace

double ExhaustionSolution::value(std::size_t k, double t) const {
  if (k >= v.size()) throw RangeError("exhaustion: level out of range");
  const std::size_t e = end_index[k];
  if (t < 0.0) throw RangeError("exhaustion: negative radius");
  if (t >= mesh[e]) return 0.0;
  auto it = std::upper_bound(mesh.begin(), mesh.begin() + static_cast<std::ptrdiff_t>(e + 1), t);
  std::size_t i = static_cast<std::size_t>(it - mesh.begin()) - 1;
  std::size_t lo = i == 0 ? 0 : i - 1;
  if (lo + 3 > e) lo = e >= 3 ? e - 3 : 0;
  double acc = 0.0;
  for (std::size_t a = lo; a < lo + 4 && a <= e; ++a) {
    double l = 1.0;
    for (std::size_t b = lo; b < lo + 4 && b <= e; ++b)
      if (b != a) l *= (t - mesh[b]) / (mesh[a] - mesh[b]);
    acc += l * v[k][a];
  }
  return acc;
}

double ExhaustionSolution::node_derivative(std::size_t k, std::size_t i) const {
  const std::size_t e = end_index[k];
  if (i == 0) return 0.0;
  if (i >= e) return (v[k][e] - v[k][e - 1]) / (mesh[e] - mesh[e - 1]);
  return (v[k][i + 1] - v[k][i - 1]) / (mesh[i + 1] - mesh[i - 1]);
}

ExhaustionSolution solve_dirichlet_exhaustion(const ModelManifold& M, const RadialFunction& psi,
                                              std::vector<double> radii, std::vector<double> p_list,
                                              const ExhaustionOptions& opt) {
  auto sol = solve_impl(M, psi, radii, p_list, opt);
  if (opt.check_refinement) {
    ExhaustionOptions fine = opt;
    fine.refine = opt.refine * 2;
    fine.check_refinement = false;
    auto ref = solve_impl(M, psi, radii, {}, fine);
    for (std::size_t k = 0; k < sol.v.size(); ++k) {
      const double scale = std::max(sol.norm_inf[k], 1e-300);
      for (std::size_t i = 0; i <= sol.end_index[k]; ++i)
        sol.refinement_change = std::max(sol.refinement_change, std::abs(sol.v[k][i] - ref.v[k][2 * i]) / scale);
    }
  }
  return sol;
}

std::vector<GradientProbe> gradient_estimate_probe(const ExhaustionSolution& sol, std::size_t k,
                                                   const std::vector<double>& q_list) {
  const std::size_t e = sol.end_index.at(k);
  std::vector<double> grad(e + 1), lap(e + 1);
  for (std::size_t i = 0; i <= e; ++i) {
    grad[i] = sol.node_derivative(k, i);
    lap[i] = sol.v[k][i] - sol.psi[i];
  }
  std::vector<GradientProbe> out;
  for (double q : q_list) {
    GradientProbe g;
    g.q = q;
    g.gradient_norm = discrete_norm(grad, sol.log_volume, e, q);
    g.rhs = discrete_norm(sol.v[k], sol.log_volume, e, q) + discrete_norm(lap, sol.log_volume, e, q);
    g.ratio = g.rhs > 0.0 ? g.gradient_norm / g.rhs : 0.0;
    out.push_back(g);
  }
  return out;
}

namespace {

// x = (s, log v), s = v'/v
struct EigenSystem {
  const ModelManifold& M;
  void rhs(double t, const ode::State<2>& x, ode::State<2>& dx) const {
    dx[0] = 1.0 - (M.n() - 1) * M.w(t) * x[0] - x[0] * x[0];
    dx[1] = x[0];
  }
  void jacobian(double t, const ode::State<2>& x, ode::Matrix<2>& J) const {
    J[0][0] = -(M.n() - 1) * M.w(t) - 2.0 * x[0];
    J[0][1] = 0.0;
    J[1][0] = 1.0;
    J[1][1] = 0.0;
  }
  bool admissible(double, const ode::State<2>& x) const { return x[0] < 0.0; }
};

}  // namespace

ExteriorEigenfunction::ExteriorEigenfunction(std::shared_ptr<const Data> data) : d_(std::move(data)) {
  const auto d = d_;
  auto eval = [d](double t) {
    const double s = d->traj.value(0, t);
    const double w = d->M->w(t);
    return Jet{1.0, s, 1.0 - (d->M->n() - 1) * w * s, d->traj.value(1, t) - d->log_v0};
  };
  char label[64];
  std::snprintf(label, sizeof label, "exterior-eigenfunction[r0=%.6g]", d_->r0);
  fn_ = RadialFunction(label, d_->r0, d_->traj.t.back(), eval, {}, false);
}

double ExteriorEigenfunction::s(double t) const {
  if (t < d_->r0 * (1.0 - 1e-14) || t > t_end() * (1.0 + 1e-14)) throw RangeError("eigenfunction: outside domain");
  return d_->traj.value(0, t);
}

double ExteriorEigenfunction::s_prime(double t) const {
  if (t < d_->r0 * (1.0 - 1e-14) || t > t_end() * (1.0 + 1e-14)) throw RangeError("eigenfunction: outside domain");
  return d_->traj.derivative(0, t);
}

double ExteriorEigenfunction::log_v(double t) const {
  if (t < d_->r0 * (1.0 - 1e-14) || t > t_end() * (1.0 + 1e-14)) throw RangeError("eigenfunction: outside domain");
  return d_->traj.value(1, t) - d_->log_v0;
}

double ExteriorEigenfunction::residual(double t) const {
  const double sv = s(t);
  return std::abs(s_prime(t) + sv * sv + (d_->M->n() - 1) * d_->M->w(t) * sv - 1.0);
}

ExteriorEigenfunction exterior_eigenfunction(std::shared_ptr<const ModelManifold> M, double r0) {
  const double T = M->t_max();
  if (!(r0 > 0.0) || !(r0 < T)) throw RangeError("exterior_eigenfunction: r0 outside the grid");
  const double b = (M->n() - 1) * M->w(T);
  // negative root of s^2 + b s - 1 = 0, written without cancellation
  const double s0 = -0.5 * (b + std::sqrt(b * b + 4.0));
  ode::Control<2> ctl;
  ctl.tol = M->tol();
  ctl.floor = {1e-300, 1.0};
  ctl.h_init = 1e-3 / (1.0 + b);
  ctl.breakpoints = M->nodes();
  EigenSystem sys{*M};
  auto data = std::make_shared<ExteriorEigenfunction::Data>();
  data->traj = ode::integrate<2>(sys, T, ode::State<2>{s0, 0.0}, r0, ctl);
  data->traj.make_increasing();
  data->M = std::move(M);
  data->r0 = r0;
  data->log_v0 = data->traj.x.front()[1];
  return ExteriorEigenfunction(std::move(data));
}

ExteriorEigenfunction exterior_eigenfunction(const ModelManifold& M, double r0) {
  return exterior_eigenfunction(std::make_shared<const ModelManifold>(M), r0);
}

double li_yau_ratio(const ExteriorEigenfunction& v, const LambdaScale& lambda, double R, double gamma) {
  if (!(gamma > 1.0)) throw ConfigurationError("li_yau_ratio: gamma must exceed 1");
  if (R < v.r0() * (1.0 - 1e-14) || gamma * R > v.t_end() * (1.0 + 1e-14))
    throw RangeError("li_yau_ratio: annulus outside the eigenfunction domain");
  const double sup = sampled_sup([&](double t) { return std::abs(v.s(t)); }, R, gamma * R, 4000);
  return sup / lambda.value(R);
}

const char* completeness_name(Completeness c) {
  switch (c) {
    case Completeness::complete: return "complete";
    case Completeness::incomplete: return "incomplete";
    case Completeness::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// int_a^b y on the model's Hermite interpolant (exact per segment)
double integrate_y(const ModelManifold& M, double a, double b) {
  const auto& t = M.nodes();
  const auto& y = M.y_nodes();
  double acc = 0.0;
  if (a < t.front()) {
    const double hi = std::min(b, t.front());
    acc += (hi * hi - a * a) / (2.0 * M.n());
    a = hi;
  }
  if (b <= a) return acc;
  static const double gx[3] = {-0.774596669241483377, 0.0, 0.774596669241483377};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::size_t i = interp::locate(t, a);
  std::vector<double> parts;
  for (; i + 1 < t.size() && t[i] < b; ++i) {
    const double lo = std::max(a, t[i]), hi = std::min(b, t[i + 1]);
    if (!(hi > lo)) continue;
    if (lo == t[i] && hi == t[i + 1]) {
      const double d0 = 1.0 - (M.n() - 1) * M.w_nodes()[i] * y[i];
      const double d1 = 1.0 - (M.n() - 1) * M.w_nodes()[i + 1] * y[i + 1];
      parts.push_back(interp::hermite_integral(t[i], t[i + 1], y[i], y[i + 1], d0, d1));
    } else {
      double s = 0.0;
      for (int g = 0; g < 3; ++g) s += gw[g] * M.y(0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[g]);
      parts.push_back(0.5 * (hi - lo) * s);
    }
  }
  return acc + quad::pairwise_sum(parts.data(), parts.size());
}

}  // namespace

StochasticDiagnostics classify_stochastic_completeness(const ModelManifold& M) {
  if (M.t_max() < 100.0) throw PreconditionError("stochastic classifier: model must reach t_max >= 100");
  StochasticDiagnostics d;
  const double T = M.t_max();
  d.T = T;
  d.u_T = integrate_y(M, 0.0, T);
  for (double a : {T / 8, T / 4, T / 2}) d.increments.push_back(integrate_y(M, a, 2 * a));
  for (std::size_t i = 1; i < d.increments.size(); ++i)
    d.increment_ratios.push_back(d.increments[i] / d.increments[i - 1]);
  const double shrink = std::pow(2.0, -0.1), hold = std::pow(2.0, -0.05);
  const bool all_shrink =
      std::all_of(d.increment_ratios.begin(), d.increment_ratios.end(), [&](double r) { return r <= shrink; });
  const bool all_hold =
      std::all_of(d.increment_ratios.begin(), d.increment_ratios.end(), [&](double r) { return r >= hold; });
  d.verdict = all_shrink ? Completeness::incomplete : all_hold ? Completeness::complete : Completeness::inconclusive;

  const auto& t = M.nodes();
  const int m = M.n() - 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (double s : {t[i], i + 1 < t.size() ? 0.5 * (t[i] + t[i + 1]) : t[i]}) {
      const double r = std::abs(M.y_prime(s) + m * M.w(s) * M.y(s) - 1.0);
      d.identity_residual = std::max(d.identity_residual, r);
    }
  }
  return d;
}

PositivityReport positivity_probe(const ModelManifold& M, const RadialFunction& mu, const RadialFunction& psi,
                                  double p, const std::vector<double>& R_list, double R_ex,
                                  const ExhaustionOptions& opt) {
  for (double R : R_list)
    if (2.0 * R > R_ex * (1.0 + 1e-14)) throw RangeError("positivity probe: cutoff annulus beyond the solve radius");
  ExhaustionOptions o = opt;
  o.check_refinement = false;
  const auto su = solve_dirichlet_exhaustion(M, mu, {R_ex}, {p}, o);
  const auto sv = solve_dirichlet_exhaustion(M, psi, {R_ex}, {p}, o);
  const auto& u = su.v[0];
  const auto& v = sv.v[0];
  const auto& t = su.mesh;
  const auto& lv = su.log_volume;
  const std::size_t e = su.end_index[0];

  PositivityReport rep;
  rep.u_min = *std::min_element(u.begin(), u.end());
  rep.u_max = *std::max_element(u.begin(), u.end());
  rep.u_norm_p = su.norm_p[0][0];
  rep.positive = rep.u_min >= -1e-8 * std::max(rep.u_max, 0.0);

  // signed x * e^{log_volume}
  auto weighted = [&](double x, std::size_t i) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::exp(std::log(std::abs(x)) + lv[i]), x);
  };
  std::vector<double> ref_parts;
  for (std::size_t i = 0; i < e; ++i) ref_parts.push_back(weighted(u[i] * sv.psi[i], i));
  rep.pairing_reference = quad::pairwise_sum(ref_parts.data(), ref_parts.size());

  const int m = M.n() - 1;
  for (double R : R_list) {
    const auto chi = make_hessian_cutoff(R);
    std::vector<double> p1, p2, p3, p4;
    for (std::size_t i = 0; i < e; ++i) {
      const Jet c = chi.jet(t[i]);
      const double lap_v = v[i] - sv.psi[i];
      const double w = t[i] > 0.0 ? M.w(t[i]) : 0.0;
      const double lap_chi = t[i] > 0.0 ? c.d2f + m * w * c.df : 0.0;
      p1.push_back(weighted(-u[i] * c.f * lap_v, i));
      p2.push_back(weighted(-u[i] * v[i] * lap_chi, i));
      p3.push_back(weighted(-2.0 * u[i] * c.df * sv.node_derivative(0, i), i));
      p4.push_back(weighted(u[i] * c.f * v[i], i));
    }
    PairingRow row;
    row.R = R;
    row.term_laplacian_v = quad::pairwise_sum(p1.data(), p1.size());
    row.term_laplacian_chi = quad::pairwise_sum(p2.data(), p2.size());
    row.term_gradient = quad::pairwise_sum(p3.data(), p3.size());
    row.term_zero_order = quad::pairwise_sum(p4.data(), p4.size());
    row.total = row.term_laplacian_v + row.term_laplacian_chi + row.term_gradient + row.term_zero_order;
    rep.rows.push_back(row);
  }
  const double ref = std::abs(rep.pairing_reference);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    const double cut = std::abs(r.term_laplacian_chi) + std::abs(r.term_gradient);
    if (i > 0) {
      const auto& q = rep.rows[i - 1];
      if (std::abs(r.term_laplacian_chi) > std::abs(q.term_laplacian_chi) ||
          std::abs(r.term_gradient) > std::abs(q.term_gradient))
        rep.pairing_decays = false;
    }
    if (i + 1 == rep.rows.size()) {
      rep.final_cutoff_fraction = ref > 0.0 ? cut / ref : 0.0;
      if (ref > 0.0 && !(std::abs(r.term_laplacian_chi) < 1e-3 * ref && std::abs(r.term_gradient) < 1e-3 * ref))
        rep.pairing_decays = false;
    }
  }
  return rep;
}

}  // namespace warplab
