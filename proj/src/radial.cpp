#include "warplab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "warplab/errors.hpp"
#include "warplab/green.hpp"
#include "warplab/smoothstep.hpp"

namespace warplab {

RadialFunction::RadialFunction(std::string label, double lo, double hi, Evaluator eval, std::vector<double> kinks,
                               bool compact)
    : label_(std::move(label)), lo_(lo), hi_(hi), eval_(std::move(eval)), kinks_(std::move(kinks)), compact_(compact) {
  if (!(hi_ >= lo_) || lo_ < 0.0) throw ConfigurationError("radial function '" + label_ + "': bad support");
  std::sort(kinks_.begin(), kinks_.end());
}

Jet RadialFunction::jet(double t) const {
  if (!eval_) return {};
  if (t < lo_ || t > hi_) {
    if (compact_) return {};
    throw RangeError("radial function '" + label_ + "' evaluated outside its domain");
  }
  return eval_(t);
}

double RadialFunction::value(double t) const {
  const Jet j = jet(t);
  return j.f == 0.0 ? 0.0 : j.f * std::exp(j.log_scale);
}

double RadialFunction::derivative(double t) const {
  const Jet j = jet(t);
  return j.df == 0.0 ? 0.0 : j.df * std::exp(j.log_scale);
}

double RadialFunction::second_derivative(double t) const {
  const Jet j = jet(t);
  return j.d2f == 0.0 ? 0.0 : j.d2f * std::exp(j.log_scale);
}

RadialFunction RadialFunction::relabeled(std::string label) const {
  RadialFunction f = *this;
  f.label_ = std::move(label);
  return f;
}

RadialFunction zero_function(std::string label) { return RadialFunction().relabeled(std::move(label)); }

RadialFunction product(const RadialFunction& a, const RadialFunction& b, std::string label) {
  if (label.empty()) label = a.label() + "*" + b.label();
  if (a.is_zero() || b.is_zero()) return zero_function(label);
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (!(hi > lo)) return zero_function(label);
  std::vector<double> kinks;
  for (double k : a.kinks())
    if (k > lo && k < hi) kinks.push_back(k);
  for (double k : b.kinks())
    if (k > lo && k < hi) kinks.push_back(k);
  auto eval = [a, b](double t) {
    const Jet x = a.jet(t);
    const Jet y = b.jet(t);
    return Jet{x.f * y.f, x.df * y.f + x.f * y.df, x.d2f * y.f + 2.0 * x.df * y.df + x.f * y.d2f,
               x.log_scale + y.log_scale};
  };
  return RadialFunction(std::move(label), lo, hi, eval, std::move(kinks), a.compact() || b.compact());
}

namespace {

struct Envelope {
  double a, b, d1, d2;
  // value, first, second derivative of S((t-a)/d1) S((b-t)/d2)
  void eval(double t, double& e, double& e1, double& e2) const {
    const double x1 = (t - a) / d1, x2 = (b - t) / d2;
    const double s1 = smoothstep(x1), s2 = smoothstep(x2);
    const double p1 = smoothstep_d1(x1) / d1, p2 = -smoothstep_d1(x2) / d2;
    const double q1 = smoothstep_d2(x1) / (d1 * d1), q2 = smoothstep_d2(x2) / (d2 * d2);
    e = s1 * s2;
    e1 = p1 * s2 + s1 * p2;
    e2 = q1 * s2 + 2.0 * p1 * p2 + s1 * q2;
  }
};

void check_envelope(const std::string& label, double a, double b, double d1, double d2) {
  if (!(a >= 0.0 && b > a && d1 > 0.0 && d2 > 0.0 && d1 + d2 <= (b - a) * (1.0 + 1e-12)))
    throw ConfigurationError("bump '" + label + "': need 0 <= a < b and ramps fitting inside [a, b]");
}

}  // namespace

RadialFunction plateau_bump(std::string label, double a, double b, double d1, double d2, double amp) {
  check_envelope(label, a, b, d1, d2);
  const Envelope env{a, b, d1, d2};
  auto eval = [env, amp](double t) {
    double e, e1, e2;
    env.eval(t, e, e1, e2);
    return Jet{amp * e, amp * e1, amp * e2, 0.0};
  };
  return RadialFunction(std::move(label), a, b, eval, {a, a + d1, b - d2, b});
}

RadialFunction oscillating_bump(std::string label, double a, double b, double d1, double d2, double amp, double m,
                                double phase) {
  check_envelope(label, a, b, d1, d2);
  const Envelope env{a, b, d1, d2};
  const double k = 2.0 * std::numbers::pi * m / (b - a);
  auto eval = [env, amp, k, phase](double t) {
    double e, e1, e2;
    env.eval(t, e, e1, e2);
    const double th = k * (t - env.a) + phase;
    const double c = std::cos(th), s = std::sin(th);
    return Jet{amp * e * c, amp * (e1 * c - e * k * s), amp * (e2 * c - 2.0 * e1 * k * s - e * k * k * c), 0.0};
  };
  return RadialFunction(std::move(label), a, b, eval, {a, a + d1, b - d2, b});
}

namespace {

double t_of_s(const GreenFunction& G, double s) {
  double lo = G.nodes().front(), hi = G.nodes().back();
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (G.s(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RadialFunction extremal_member(std::string label, const GreenFunction& G, double s_lo, double s_hi, double ramp) {
  if (!(s_hi > s_lo) || !(ramp > 0.0) || 2.0 * ramp > (s_hi - s_lo) * (1.0 + 1e-12))
    throw ConfigurationError("extremal member '" + label + "': bad window in s");
  const double s_min = G.s(G.nodes().front()), s_max = G.s(G.nodes().back());
  if (s_lo < s_min || s_hi > s_max) throw RangeError("extremal member '" + label + "': window beyond the grid");
  const double ta = t_of_s(G, s_lo), tb = t_of_s(G, s_hi);
  const double gamma = (G.p() - 1.0) / G.p();
  const Envelope env{s_lo, s_hi, ramp, ramp};
  const GreenFunction* g = &G;
  auto eval = [g, env, gamma](double t) {
    const double z = g->z(t), zp = g->z_prime(t), logG = g->logG(t);
    double ph, ph1, ph2;
    env.eval(-logG, ph, ph1, ph2);
    const double u = ph1 - gamma * ph;
    return Jet{ph, u / z, (ph2 - gamma * ph1 - (gamma + zp) * u) / (z * z), gamma * logG};
  };
  return RadialFunction(std::move(label), ta, tb, eval,
                        {ta, t_of_s(G, s_lo + ramp), t_of_s(G, s_hi - ramp), tb});
}

const char* deriv_name(Deriv d) {
  switch (d) {
    case Deriv::value: return "value";
    case Deriv::gradient: return "gradient";
    case Deriv::hessian: return "hessian";
    case Deriv::laplacian: return "laplacian";
  }
  return "?";
}

double jet_magnitude(const Jet& j, Deriv d, int n, double w) {
  switch (d) {
    case Deriv::value: return std::abs(j.f);
    case Deriv::gradient: return std::abs(j.df);
    case Deriv::hessian: return std::sqrt(j.d2f * j.d2f + (n - 1) * (w * j.df) * (w * j.df));
    case Deriv::laplacian: return std::abs(j.d2f + (n - 1) * w * j.df);
  }
  return 0.0;
}

std::optional<double> radial_p_laplacian(int n, double w, double p, double df, double d2f) {
  if (df == 0.0) {
    if (p < 2.0) return std::nullopt;
    if (p > 2.0) return 0.0;
  }
  const double g = p == 2.0 ? 1.0 : std::pow(std::abs(df), p - 2.0);
  return g * (df * (n - 1) * w + (p - 1.0) * d2f);
}

std::optional<double> p_laplacian(const ModelManifold& M, const RadialFunction& f, double p, double t) {
  const double w = M.w(t);
  const Jet j = f.jet(t);
  auto v = radial_p_laplacian(M.n(), w, p, j.df, j.d2f);
  if (!v || *v == 0.0) return v;
  return *v * std::exp((p - 1.0) * j.log_scale);
}

quad::Result integrate_volume(const ModelManifold& M, double a, double b, const std::vector<double>& kinks,
                              std::size_t K, const VolumeIntegrand& fn, const quad::Options& opt) {
  if (b > M.t_max() * (1.0 + 1e-14) || a < 0.0) throw RangeError("integration window outside the model grid");
  const double log_sphere = log_sphere_area(M.n());
  const int m = M.n() - 1;
  auto wrapped = [&](double t, double& L, double* g) {
    fn(t, L, g);
    L += m * M.logj(t) + log_sphere;
  };
  return quad::integrate(wrapped, K, a, b, kinks, opt);
}

quad::Result integrate_volume_on_mesh(const ModelManifold& M, const std::vector<double>& edges, std::size_t K,
                                      const VolumeIntegrand& fn, const std::vector<double>& log_refs) {
  const double log_sphere = log_sphere_area(M.n());
  const int m = M.n() - 1;
  auto wrapped = [&](double t, double& L, double* g) {
    fn(t, L, g);
    L += m * M.logj(t) + log_sphere;
  };
  return quad::integrate_on_mesh(wrapped, K, edges, log_refs);
}

namespace {

VolumeIntegrand norm_integrand(const ModelManifold& M, const RadialFunction& f, double p) {
  return [&M, &f, p](double t, double& L, double* g) {
    const Jet j = f.jet(t);
    const double w = M.w(t);
    L = p * j.log_scale;
    for (int k = 0; k < 4; ++k) {
      const double m = jet_magnitude(j, static_cast<Deriv>(k), M.n(), w);
      g[k] = m == 0.0 ? 0.0 : std::pow(m, p);
    }
  };
}

}  // namespace

std::array<quad::ScaledValue, 4> lp_integrals(const ModelManifold& M, const RadialFunction& f, double p,
                                              const quad::Options& opt, quad::Result* detail) {
  if (!(p >= 1.0)) throw DomainError("lp_integrals: p must be >= 1");
  std::array<quad::ScaledValue, 4> out{};
  if (f.is_zero()) return out;
  if (f.hi() > M.t_max() * (1.0 + 1e-14)) throw RangeError("function '" + f.label() + "' extends beyond the grid");
  auto res = integrate_volume(M, f.lo(), f.hi(), f.kinks(), 4, norm_integrand(M, f, p), opt);
  for (int k = 0; k < 4; ++k) out[k] = res.values[k];
  if (detail) *detail = std::move(res);
  return out;
}

double lp_norm(const ModelManifold& M, const RadialFunction& f, double p, Deriv d, const quad::Options& opt) {
  const auto I = lp_integrals(M, f, p, opt);
  const auto& v = I[static_cast<int>(d)];
  if (v.is_zero()) return 0.0;
  return std::exp(v.log() / p);
}

double lp_refinement_change(const ModelManifold& M, const RadialFunction& f, double p, const quad::Options& opt) {
  if (f.is_zero()) return 0.0;
  quad::Result base;
  lp_integrals(M, f, p, opt, &base);
  auto fine = integrate_volume_on_mesh(M, quad::refine_mesh(base.edges), 4, norm_integrand(M, f, p), base.log_refs);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (base.values[k].is_zero()) continue;
    const double r = std::exp((fine.values[k].log() - base.values[k].log()) / p);
    worst = std::max(worst, std::abs(r - 1.0));
  }
  return worst;
}

namespace {

// Additive recurrence with the generalized golden ratio for dimension D.
template <std::size_t D>
class Kronecker {
 public:
  explicit Kronecker(std::uint64_t seed) {
    double g = 2.0;
    for (int i = 0; i < 64; ++i) g = std::pow(1.0 + g, 1.0 / (D + 1.0));
    std::mt19937_64 rng(seed);
    for (std::size_t d = 0; d < D; ++d) {
      alpha_[d] = std::fmod(std::pow(1.0 / g, static_cast<double>(d + 1)), 1.0);
      offset_[d] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
  }
  std::array<double, D> point(std::size_t i) const {
    std::array<double, D> u;
    for (std::size_t d = 0; d < D; ++d) {
      const double v = offset_[d] + static_cast<double>(i + 1) * alpha_[d];
      u[d] = v - std::floor(v);
    }
    return u;
  }

 private:
  std::array<double, D> alpha_{}, offset_{};
};

std::string fmt(const char* f, double a, double b, double c, double d, double e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

}  // namespace

std::vector<RadialFunction> generate_corpus(const TestCorpus& spec, const ModelManifold& M, double inner_radius,
                                            const GreenFunction* G) {
  std::vector<RadialFunction> out;
  if (spec.size == 0) return out;
  const double lo = inner_radius, hi = 0.9 * M.t_max();
  if (!(hi > lo) || !(lo >= 0.0)) throw ConfigurationError("generate_corpus: empty support window");
  const double W = hi - lo;

  std::size_t n_ext = 0;
  if (spec.extremal && G != nullptr && spec.size >= 2 * spec.extremal_members) n_ext = spec.extremal_members;
  if (n_ext > 0) {
    const double s0 = G->s(lo), s1 = G->s(hi);
    for (std::size_t j = 1; j <= n_ext; ++j) {
      const double L = (s1 - s0) * static_cast<double>(j) / static_cast<double>(n_ext);
      char buf[96];
      std::snprintf(buf, sizeof buf, "extremal-%02zu[s=%.6g..%.6g]", j, s0, s0 + L);
      out.push_back(extremal_member(buf, *G, s0, s0 + L, 0.25 * L));
    }
  }

  const bool plate = spec.plateau, osc = spec.oscillatory && spec.max_oscillations > 0;
  if (!plate && !osc) {
    if (out.size() < spec.size) throw ConfigurationError("generate_corpus: no bump family enabled");
    return out;
  }
  Kronecker<7> seq(spec.seed);
  for (std::size_t i = 0; out.size() < spec.size; ++i) {
    const auto u = seq.point(i);
    const double width = W * (0.03 + 0.97 * u[0]);
    const double a = lo + u[1] * (W - width);
    const double b = a + width;
    const double d1 = width * (0.05 + 0.45 * u[2]);
    const double d2 = width * (0.05 + 0.45 * u[3]);
    const double amp = 0.5 + 1.5 * u[4];
    const bool oscillate = osc && (!plate || i % 2 == 1);
    char idx[32];
    std::snprintf(idx, sizeof idx, "%04zu", i);
    if (oscillate) {
      const double m = 1.0 + std::floor(u[5] * spec.max_oscillations);
      const double phase = 2.0 * std::numbers::pi * u[6];
      std::string label = std::string("osc-") + idx + fmt("[a=%.6g,b=%.6g,m=%.0f,ph=%.4f,amp=%.4f]", a, b, m, phase, amp);
      out.push_back(oscillating_bump(label, a, b, d1, d2, amp, m, phase));
    } else {
      std::string label = std::string("plateau-") + idx + fmt("[a=%.6g,b=%.6g,r1=%.4g,r2=%.4g,amp=%.4f]", a, b, d1, d2, amp);
      out.push_back(plateau_bump(label, a, b, d1, d2, amp));
    }
  }
  return out;
}

}  // namespace warplab
