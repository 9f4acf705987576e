#include "warplab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "warplab/cutoff.hpp"
#include "warplab/errors.hpp"
#include "warplab/fit.hpp"
#include "warplab/smoothstep.hpp"

namespace warplab {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::report_only: return "report-only";
  }
  return "?";
}

double InequalityReport::diagnostic(const std::string& key) const {
  for (const auto& [k, v] : diagnostics)
    if (k == key) return v;
  throw RangeError("report '" + name + "' has no diagnostic '" + key + "'");
}

void finalize(InequalityReport& r) {
  r.empirical_constant = 0.0;
  for (const auto& rec : r.records) r.empirical_constant = std::max(r.empirical_constant, rec.ratio);
  if (!r.sharp_constant) return;
  const double limit = *r.sharp_constant * (1.0 + 10.0 * r.quadrature_tol);
  r.verdict = Verdict::holds;
  for (const auto& rec : r.records) {
    if (!(rec.ratio <= limit)) {
      r.verdict = Verdict::violated;
      r.offending = rec.label;
      break;
    }
  }
}

double enrichment_change(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

namespace {

constexpr double kLogRange = 700.0;

// Record from log-magnitudes; mantissas stay O(1) when the values would not fit a double.
Record record_from_logs(const std::string& label, double log_lhs, double log_rhs) {
  Record r;
  r.label = label;
  const double ninf = -std::numeric_limits<double>::infinity();
  if (log_lhs == ninf && log_rhs == ninf) return r;
  const double anchor = log_rhs != ninf ? log_rhs : log_lhs;
  r.log_scale = std::abs(anchor) > kLogRange || std::abs(log_lhs) > kLogRange ? anchor : 0.0;
  r.lhs = log_lhs == ninf ? 0.0 : std::exp(log_lhs - r.log_scale);
  r.rhs = log_rhs == ninf ? 0.0 : std::exp(log_rhs - r.log_scale);
  if (log_lhs == ninf)
    r.ratio = 0.0;
  else if (log_rhs == ninf)
    r.ratio = std::numeric_limits<double>::infinity();
  else
    r.ratio = std::exp(log_lhs - log_rhs);
  return r;
}

double log_sum(std::initializer_list<double> logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double l : logs) m = std::max(m, l);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - m);
  return m + std::log(s);
}

double powp(double x, double p) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), p); }

void check_hardy_support(const GreenFunction& G, const RadialFunction& f) {
  const double hi = 0.9 * G.model().t_max();
  if (f.lo() < G.r_K() * (1.0 - 1e-12) || f.hi() > hi * (1.0 + 1e-12))
    throw PreconditionError("function '" + f.label() + "' is not supported in [r_K, 0.9 t_max]");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

InequalityReport verify_hardy(const GreenFunction& G, double beta, const std::vector<RadialFunction>& corpus,
                              const VerifyOptions& opt) {
  if (!(beta >= 0.0)) throw ConfigurationError("verify_hardy: beta must be non-negative");
  const double p = G.p();
  InequalityReport rep;
  rep.name = "hardy";
  rep.p = p;
  rep.beta = beta;
  rep.sharp_constant = std::pow(p / (p - 1.0), p);
  rep.quadrature_tol = opt.quad.tol;
  const ModelManifold& M = G.model();
  for (const auto& f : corpus) {
    if (f.is_zero()) {
      rep.records.push_back(record_from_logs(f.label(), -INFINITY, -INFINITY));
      continue;
    }
    check_hardy_support(G, f);
    auto integrand = [&](double t, double& L, double* g) {
      const Jet j = f.jet(t);
      const double sb = beta == 0.0 ? 1.0 : std::pow(G.s(t), beta * p);
      L = p * j.log_scale;
      g[0] = std::pow(1.0 / G.z(t), p) * sb * powp(j.f, p);
      g[1] = sb * powp(j.df, p);
    };
    auto res = integrate_volume(M, f.lo(), f.hi(), f.kinks(), 2, integrand, opt.quad);
    rep.records.push_back(record_from_logs(f.label(), res.values[0].log(), res.values[1].log()));
  }
  finalize(rep);
  return rep;
}

InequalityReport verify_hardy2(const GreenFunction& G, double beta, const std::vector<RadialFunction>& corpus,
                               const VerifyOptions& opt) {
  if (!(beta >= 0.0)) throw ConfigurationError("verify_hardy2: beta must be non-negative");
  const double p = G.p();
  const double bound = std::pow(p / (p - 1.0), p);
  InequalityReport rep;
  rep.name = "hardy2";
  rep.p = p;
  rep.beta = beta;
  rep.quadrature_tol = opt.quad.tol;
  const ModelManifold& M = G.model();

  // C_log = sup (s^beta z)^p over the admissible window
  const double hi = 0.9 * M.t_max();
  double c_log = 0.0;
  if (std::isfinite(G.r_K()) && G.r_K() < hi) {
    c_log = sampled_sup([&](double t) { return std::pow(std::pow(G.s(t), beta) * G.z(t), p); }, G.r_K(), hi, 20000);
  }
  rep.diagnostics.emplace_back("C_log", c_log);

  const double slack = 1.0 + 10.0 * opt.quad.tol;
  double chain_failures = 0.0;
  for (const auto& f : corpus) {
    if (f.is_zero()) {
      Record r = record_from_logs(f.label(), -INFINITY, -INFINITY);
      r.extra = {{"mid_weighted_gradient", 0.0}, {"mid_green_gradient", 0.0}, {"chain_ok", 1.0}};
      rep.records.push_back(r);
      continue;
    }
    check_hardy_support(G, f);
    const int n = M.n();
    auto integrand = [&](double t, double& L, double* g) {
      const Jet j = f.jet(t);
      const double sb = beta == 0.0 ? 1.0 : std::pow(G.s(t), beta * p);
      const double iz = std::pow(1.0 / G.z(t), p);
      L = p * j.log_scale;
      g[0] = iz * sb * powp(j.f, p);
      g[1] = powp(jet_magnitude(j, Deriv::hessian, n, M.w(t)), p);
      g[2] = sb * powp(j.df, p);
      g[3] = iz * powp(j.df, p);
    };
    auto res = integrate_volume(M, f.lo(), f.hi(), f.kinks(), 4, integrand, opt.quad);
    Record r = record_from_logs(f.label(), res.values[0].log(), res.values[1].log());
    const double l_lhs = res.values[0].log(), l_rhs = res.values[1].log();
    const double l_mid1 = res.values[2].log(), l_mid2 = res.values[3].log();
    const double lb = std::log(bound), lc = std::log(c_log);
    const double ls = std::log(slack);
    const bool chain = l_lhs <= lb + l_mid1 + ls && l_mid1 <= lc + l_mid2 + ls && l_mid2 <= lb + l_rhs + ls;
    if (!chain) chain_failures += 1.0;
    r.extra = {{"mid_weighted_gradient", std::exp(l_mid1 - r.log_scale)},
               {"mid_green_gradient", std::exp(l_mid2 - r.log_scale)},
               {"chain_ok", chain ? 1.0 : 0.0}};
    rep.records.push_back(r);
  }
  rep.diagnostics.emplace_back("chain_failures", chain_failures);
  rep.diagnostics.emplace_back("chain_constant", bound * bound * c_log);
  finalize(rep);
  return rep;
}

double supported_weight_exponent(const ModelManifold& M) {
  if (const auto* pl = std::get_if<PowerLaw>(&M.profile().kind())) return pl->alpha;
  std::vector<double> t, w;
  const double T = M.t_max();
  for (int i = 0; i <= 64; ++i) {
    const double s = T / 10.0 * std::pow(10.0, i / 64.0);
    t.push_back(s);
    w.push_back(M.w(std::min(s, T)));
  }
  return 2.0 * fit::power_exponent(t, w) + 0.05;
}

InequalityReport verify_weight_embedding(const ModelManifold& M, const std::vector<RadialFunction>& corpus,
                                         const RadialFunction& sweep_function, const EmbeddingOptions& opt) {
  const double p = opt.p;
  if (!(p >= 1.0)) throw ConfigurationError("weight embedding: p must be >= 1");
  if (opt.alpha > supported_weight_exponent(M) + 1e-12)
    throw ConfigurationError("weight embedding: alpha exceeds the weight growth the model supports");
  const double a = opt.first_order ? 0.5 * opt.alpha : opt.alpha;
  InequalityReport rep;
  rep.name = opt.first_order ? "embed1" : "embed";
  rep.p = p;
  rep.beta = a;
  rep.quadrature_tol = opt.verify.quad.tol;
  const int n = M.n();
  const double r_in = opt.inner_radius, ramp = opt.ramp;

  for (const auto& f : corpus) {
    if (f.is_zero()) {
      rep.records.push_back(record_from_logs(f.label(), -INFINITY, -INFINITY));
      continue;
    }
    std::vector<double> kinks = f.kinks();
    kinks.push_back(r_in);
    kinks.push_back(r_in + ramp);
    auto integrand = [&](double t, double& L, double* g) {
      const Jet j = f.jet(t);
      const double om = std::pow(t, a) * smoothstep((t - r_in) / ramp);
      L = p * j.log_scale;
      g[0] = powp(om * j.f, p);
      g[1] = powp(j.f, p);
      g[2] = powp(j.df, p);
      g[3] = opt.first_order ? 0.0 : powp(jet_magnitude(j, Deriv::hessian, n, M.w(t)), p);
    };
    auto res = integrate_volume(M, f.lo(), f.hi(), kinks, 4, integrand, opt.verify.quad);
    const double l_w = res.values[0].log() / p;
    const double l_norm = log_sum({res.values[1].log() / p, res.values[2].log() / p, res.values[3].log() / p});
    rep.records.push_back(record_from_logs(f.label(), l_w, l_norm));
  }

  if (!opt.sweep_R.empty() && !sweep_function.is_zero()) {
    std::vector<double> sweep;
    for (double R : opt.sweep_R) {
      if (2.0 * R > M.t_max() * (1.0 + 1e-14)) throw RangeError("weight embedding: sweep radius beyond the grid");
      const auto chi = make_hessian_cutoff(R);
      const auto& f = sweep_function;
      double v = 0.0;
      const double lo = std::max(R, f.lo());
      if (f.hi() > lo) {
        std::vector<double> kinks = f.kinks();
        kinks.push_back(2.0 * R);
        auto integrand = [&](double t, double& L, double* g) {
          const Jet j = f.jet(t);
          L = p * j.log_scale;
          g[0] = powp(std::pow(t, a) * (1.0 - chi.value(t)) * j.f, p);
        };
        auto res = integrate_volume(M, lo, f.hi(), kinks, 1, integrand, opt.verify.quad);
        v = res.values[0].is_zero() ? 0.0 : std::exp(res.values[0].log() / p);
      }
      sweep.push_back(v);
      rep.diagnostics.emplace_back(fmt("sweep[R=%g]", R), v);
    }
    bool ok = sweep.front() > 0.0 && sweep.back() < 1e-3 * sweep.front();
    for (std::size_t i = 1; i < sweep.size(); ++i)
      if (!(sweep[i] < sweep[i - 1]) && !(sweep[i] == 0.0 && sweep[i - 1] == 0.0)) ok = false;
    rep.diagnostics.emplace_back("sweep_final_over_initial", sweep.front() > 0.0 ? sweep.back() / sweep.front() : 0.0);
    finalize(rep);
    rep.verdict = ok ? Verdict::holds : Verdict::violated;
    if (!ok) rep.offending = "sweep";
    return rep;
  }
  finalize(rep);
  return rep;
}

InequalityReport verify_cz2(const ModelManifold& M, const std::vector<RadialFunction>& corpus, const CZOptions& opt) {
  InequalityReport rep;
  rep.name = "cz2";
  rep.p = 2.0;
  rep.beta = opt.weight_beta;
  rep.quadrature_tol = opt.verify.quad.tol;
  const int n = M.n();
  struct Norms {
    double H2, D2, V2, W2;
  };
  std::vector<Norms> norms;
  double worst_bochner = 0.0;
  for (const auto& f : corpus) {
    if (f.is_zero()) {
      Record r = record_from_logs(f.label(), -INFINITY, -INFINITY);
      r.extra = {{"bochner_residual", 0.0}};
      rep.records.push_back(r);
      norms.push_back({0, 0, 0, 0});
      continue;
    }
    auto integrand = [&](double t, double& L, double* g) {
      const Jet j = f.jet(t);
      const double w = M.w(t);
      L = 2.0 * j.log_scale;
      const double lap = j.d2f + (n - 1) * w * j.df;
      g[0] = j.d2f * j.d2f + (n - 1) * w * w * j.df * j.df;
      g[1] = lap * lap;
      g[2] = j.f * j.f;
      g[3] = (n - 1) * M.kappa(t) * j.df * j.df;
      g[4] = std::pow(t, 2.0 * opt.weight_beta) * j.f * j.f;
    };
    auto res = integrate_volume(M, f.lo(), f.hi(), f.kinks(), 5, integrand, opt.verify.quad);
    // common scale for the Bochner combination
    const double ref = res.values[1].log();
    auto rel = [&](int k) { return res.values[k].is_zero() ? 0.0 : std::exp(res.values[k].log() - ref); };
    const double h2 = rel(0), d2 = rel(1), k2 = rel(3);
    const double bochner = std::abs(d2 - h2 + k2) / (d2 + h2 + k2);
    worst_bochner = std::max(worst_bochner, bochner);
    const double lH = res.values[0].log() / 2, lD = res.values[1].log() / 2, lV = res.values[2].log() / 2;
    Record r = record_from_logs(f.label(), lH, log_sum({lD, lV}));
    r.extra = {{"bochner_residual", bochner}};
    rep.records.push_back(r);
    auto val = [&](int k) { return res.values[k].value(); };
    norms.push_back({val(0), std::pow(std::sqrt(val(1)) + std::sqrt(val(2)), 2.0), val(2), val(4)});
  }
  rep.diagnostics.emplace_back("max_bochner_residual", worst_bochner);
  for (double eps : opt.epsilons) {
    for (double A2 : opt.A2_grid) {
      double a1sq = 0.0;
      for (const auto& nm : norms) {
        if (nm.D2 == 0.0) continue;
        a1sq = std::max(a1sq, (nm.H2 - A2 * eps * eps * nm.W2) / nm.D2);
      }
      char key[96];
      std::snprintf(key, sizeof key, "A1[eps=%g,A2=%g]", eps, A2);
      rep.diagnostics.emplace_back(key, std::sqrt(std::max(a1sq, 0.0)));
    }
  }
  finalize(rep);
  return rep;
}

RadialFunction tail_surrogate(const ModelManifold& M, double p, double m, double t_on) {
  const double T = 0.9 * M.t_max();
  const double off = 0.1 * T;
  if (!(t_on > 0.0) || t_on + 1.0 >= T - off) throw ConfigurationError("tail surrogate: grid too short");
  const double q = (M.n() - 1) / p;
  const ModelManifold* mp = &M;
  auto eval = [mp, q, m, t_on, T, off](double t) {
    const double x1 = t - t_on, x2 = (T - t) / off;
    const double e = smoothstep(x1) * smoothstep(x2);
    const double e1 = smoothstep_d1(x1) * smoothstep(x2) - smoothstep(x1) * smoothstep_d1(x2) / off;
    const double e2 = smoothstep_d2(x1) * smoothstep(x2) - 2.0 * smoothstep_d1(x1) * smoothstep_d1(x2) / off +
                      smoothstep(x1) * smoothstep_d2(x2) / (off * off);
    const double w = mp->w(t);
    const double ls = -q * mp->logj(t) - m * std::log(t);
    const double l1 = -q * w - m / t;
    const double l2 = -q * (mp->kappa(t) - w * w) + m / (t * t);
    return Jet{e, e1 + l1 * e, e2 + 2.0 * l1 * e1 + (l2 + l1 * l1) * e, ls};
  };
  char label[96];
  std::snprintf(label, sizeof label, "tail[m=%g,p=%g]", m, p);
  return RadialFunction(label, t_on, T, eval, {t_on, t_on + 1.0, T - off, T});
}

InequalityReport density_probe(const ModelManifold& M, const RadialFunction& f, double p,
                               const std::vector<double>& R_list, const VerifyOptions& opt) {
  InequalityReport rep;
  rep.name = "density";
  rep.p = p;
  rep.quadrature_tol = opt.quad.tol;
  const int n = M.n();
  std::array<std::vector<double>, 3> cols;
  double bound_failures = 0.0;
  for (double R : R_list) {
    if (2.0 * R > M.t_max() * (1.0 + 1e-14)) throw RangeError("density probe: radius beyond the grid");
    const auto chi = make_hessian_cutoff(R);
    std::array<double, 7> nrm{};
    const double lo = std::max(R, f.lo());
    double l_f = -INFINITY;
    if (!f.is_zero() && f.hi() > lo) {
      std::vector<double> kinks = f.kinks();
      kinks.push_back(2.0 * R);
      auto integrand = [&](double t, double& L, double* g) {
        const Jet j = f.jet(t);
        const Jet c = chi.jet(t);
        const double w = M.w(t);
        const double cm1 = c.f - 1.0;
        L = p * j.log_scale;
        g[0] = powp(cm1 * j.f, p);
        g[1] = powp(j.f * c.df, p);
        g[2] = powp(cm1 * j.df, p);
        g[3] = powp(j.df * c.df, p);
        g[4] = powp(cm1 * jet_magnitude(j, Deriv::hessian, n, w), p);
        g[5] = powp(j.f * jet_magnitude(c, Deriv::hessian, n, w), p);
        g[6] = powp(j.f, p);
      };
      auto res = integrate_volume(M, lo, f.hi(), kinks, 7, integrand, opt.quad);
      for (int k = 0; k < 7; ++k) nrm[k] = res.values[k].is_zero() ? 0.0 : std::exp(res.values[k].log() / p);
      l_f = nrm[6];
    }
    const double c1 = nrm[0], c2 = nrm[1] + nrm[2], c3 = 2.0 * nrm[3] + nrm[4] + nrm[5];
    cols[0].push_back(c1);
    cols[1].push_back(c2);
    cols[2].push_back(c3);
    // |chi'| <= (15/8)/R on the annulus
    const bool grad_ok = nrm[1] <= kSmoothstepSupD1 / R * (std::isfinite(l_f) ? l_f : 0.0) * (1.0 + 1e-9);
    if (!grad_ok) bound_failures += 1.0;
    Record r;
    r.label = fmt("R=%g", R);
    r.lhs = c3;
    r.rhs = cols[2].front();
    r.ratio = cols[2].front() > 0.0 ? c3 / cols[2].front() : 0.0;
    r.extra = {{"R", R}, {"value", c1}, {"gradient", c2}, {"hessian", c3}};
    rep.records.push_back(r);
  }
  bool ok = true;
  bool vacuous = true;
  for (const auto& c : cols) {
    if (c.empty()) continue;
    if (c.front() == 0.0) continue;
    vacuous = false;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (!(c[i] < c[i - 1])) ok = false;
    if (!(c.back() < 1e-3 * c.front())) ok = false;
  }
  const char* names[3] = {"value", "gradient", "hessian"};
  for (int k = 0; k < 3; ++k)
    if (!cols[k].empty())
      rep.diagnostics.emplace_back(std::string(names[k]) + "_final_over_initial",
                                   cols[k].front() > 0.0 ? cols[k].back() / cols[k].front() : 0.0);
  rep.diagnostics.emplace_back("gradient_bound_failures", bound_failures);
  finalize(rep);
  rep.verdict = ok ? Verdict::holds : Verdict::violated;
  if (!ok) rep.offending = "remainder columns";
  if (vacuous) rep.notes.push_back("f is supported inside the smallest ball; every remainder vanishes");
  return rep;
}

}  // namespace warplab
