#include "warplab/quadrature.hpp"

#include <algorithm>

#include "warplab/errors.hpp"

namespace warplab::quad {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights on kXgk[1], kXgk[3], kXgk[5], kXgk[7]
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// log overflow guard: rescale when a sample exceeds the reference by this much
constexpr double kHeadroom = 600.0;

struct Panel {
  double a, b;
  std::vector<double> kron, err, absint;
  std::vector<double> ref;  // log references the sums are relative to
};

class Engine {
 public:
  Engine(const Integrand& fn, std::size_t K, std::vector<double> refs) : fn_(fn), K_(K), refs_(std::move(refs)) {
    g_.resize(K);
  }

  void eval_panel(Panel& p) {
    const std::vector<double> before = refs_;
    eval_once(p);
    if (refs_ != before) eval_once(p);
    p.ref = refs_;
  }

  const std::vector<double>& refs() const { return refs_; }
  long evaluations() const { return evals_; }

 private:
  void eval_once(Panel& p) {
    p.kron.assign(K_, 0.0);
    p.err.assign(K_, 0.0);
    p.absint.assign(K_, 0.0);
    std::vector<double> gauss(K_, 0.0);
    const double c = 0.5 * (p.a + p.b);
    const double h = 0.5 * (p.b - p.a);
    for (int j = 0; j < 15; ++j) {
      const int idx = j < 7 ? j : (j == 7 ? 7 : 14 - j);
      const double x = j < 7 ? c - h * kXgk[idx] : (j == 7 ? c : c + h * kXgk[idx]);
      sample(x);
      for (std::size_t k = 0; k < K_; ++k) {
        const double v = scaled(k);
        p.kron[k] += kWgk[idx] * v;
        p.absint[k] += kWgk[idx] * std::abs(v);
        if (idx % 2 == 1) gauss[k] += kWg[idx / 2] * v;
      }
    }
    for (std::size_t k = 0; k < K_; ++k) {
      p.err[k] = std::abs(p.kron[k] - gauss[k]) * h;
      p.kron[k] *= h;
      p.absint[k] *= h;
    }
  }

  void sample(double x) {
    ++evals_;
    double L = 0.0;
    fn_(x, L, g_.data());
    L_ = L;
    for (std::size_t k = 0; k < K_; ++k) {
      if (g_[k] == 0.0 || !std::isfinite(L)) continue;
      const double mag = L + std::log(std::abs(g_[k]));
      if (mag > refs_[k] + kHeadroom) refs_[k] = mag;
    }
  }
  double scaled(std::size_t k) const {
    if (g_[k] == 0.0 || !std::isfinite(L_)) return 0.0;
    return std::exp(L_ - refs_[k]) * g_[k];
  }

  const Integrand& fn_;
  std::size_t K_;
  std::vector<double> refs_;
  std::vector<double> g_;
  double L_ = 0.0;
  long evals_ = 0;
};

std::vector<double> prescan(const Integrand& fn, std::size_t K, const std::vector<double>& edges, int points) {
  std::vector<double> refs(K, -std::numeric_limits<double>::infinity());
  std::vector<double> g(K);
  const std::size_t per = std::max<std::size_t>(2, static_cast<std::size_t>(points) / (edges.size() - 1));
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    for (std::size_t i = 0; i <= per; ++i) {
      // interior sample points, avoiding the end points themselves
      const double u = (i + 0.5) / (per + 1.0);
      const double x = edges[e] + u * (edges[e + 1] - edges[e]);
      double L = 0.0;
      fn(x, L, g.data());
      if (!std::isfinite(L)) continue;
      for (std::size_t k = 0; k < K; ++k)
        if (g[k] != 0.0 && std::isfinite(g[k])) refs[k] = std::max(refs[k], L + std::log(std::abs(g[k])));
    }
  }
  for (double& r : refs)
    if (!std::isfinite(r)) r = 0.0;
  return refs;
}

double factor(const Panel& p, const std::vector<double>& refs, std::size_t k) {
  return p.ref[k] == refs[k] ? 1.0 : std::exp(p.ref[k] - refs[k]);
}

Result finish(const std::vector<Panel>& panels, std::size_t K, const std::vector<double>& refs, double tol) {
  Result r;
  r.values.resize(K);
  r.log_refs = refs;
  std::vector<double> buf(panels.size());
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < panels.size(); ++i) buf[i] = panels[i].kron[k] * factor(panels[i], refs, k);
    const double s = pairwise_sum(buf.data(), buf.size());
    for (std::size_t i = 0; i < panels.size(); ++i) buf[i] = panels[i].err[k] * factor(panels[i], refs, k);
    const double e = pairwise_sum(buf.data(), buf.size());
    for (std::size_t i = 0; i < panels.size(); ++i) buf[i] = panels[i].absint[k] * factor(panels[i], refs, k);
    const double a = pairwise_sum(buf.data(), buf.size());
    r.values[k] = ScaledValue{s, refs[k]};
    if (a > 0.0) r.error = std::max(r.error, e / (tol * a));
  }
  r.edges.reserve(panels.size() + 1);
  for (const auto& p : panels) r.edges.push_back(p.a);
  if (!panels.empty()) r.edges.push_back(panels.back().b);
  return r;
}

}  // namespace

double ratio(const ScaledValue& a, const ScaledValue& b) {
  if (a.is_zero()) return 0.0;
  if (b.is_zero()) return std::numeric_limits<double>::infinity();
  const double sign = (a.mantissa < 0.0) != (b.mantissa < 0.0) ? -1.0 : 1.0;
  return sign * std::exp(std::log(std::abs(a.mantissa)) + a.log_scale - std::log(std::abs(b.mantissa)) - b.log_scale);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

std::vector<double> refine_mesh(const std::vector<double>& edges) {
  std::vector<double> out;
  out.reserve(2 * edges.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(edges[i]);
    out.push_back(0.5 * (edges[i] + edges[i + 1]));
  }
  if (!edges.empty()) out.push_back(edges.back());
  return out;
}

Result integrate_on_mesh(const Integrand& fn, std::size_t K, const std::vector<double>& edges,
                         const std::vector<double>& log_refs) {
  if (edges.size() < 2) {
    Result r;
    r.values.assign(K, ScaledValue{});
    r.log_refs = log_refs;
    return r;
  }
  Engine eng(fn, K, log_refs);
  std::vector<Panel> panels(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    panels[i].a = edges[i];
    panels[i].b = edges[i + 1];
    eng.eval_panel(panels[i]);
  }
  Result r = finish(panels, K, eng.refs(), 1.0);
  r.evaluations = eng.evaluations();
  return r;
}

Result integrate(const Integrand& fn, std::size_t K, double a, double b, const std::vector<double>& breakpoints,
                 const Options& opt) {
  if (!(b >= a)) throw DomainError("integrate: reversed interval");
  std::vector<double> cuts{a};
  std::vector<double> bp = breakpoints;
  std::sort(bp.begin(), bp.end());
  for (double x : bp)
    if (x > cuts.back() && x < b) cuts.push_back(x);
  cuts.push_back(b);
  if (b == a) {
    Result r;
    r.values.assign(K, ScaledValue{});
    r.log_refs.assign(K, 0.0);
    r.edges = {a, b};
    return r;
  }

  std::vector<double> edges;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    for (int j = 0; j < opt.initial_panels; ++j) edges.push_back(lo + (hi - lo) * j / opt.initial_panels);
  }
  edges.push_back(b);

  Engine eng(fn, K, prescan(fn, K, edges, opt.prescan_points));
  std::vector<Panel> panels(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    panels[i].a = edges[i];
    panels[i].b = edges[i + 1];
    eng.eval_panel(panels[i]);
  }

  bool converged = false;
  while (true) {
    std::vector<double> total_err(K, 0.0), total_abs(K, 0.0);
    for (const auto& p : panels)
      for (std::size_t k = 0; k < K; ++k) {
        const double f = factor(p, eng.refs(), k);
        total_err[k] += p.err[k] * f;
        total_abs[k] += p.absint[k] * f;
      }
    bool ok = true;
    for (std::size_t k = 0; k < K; ++k)
      if (total_abs[k] > 0.0 && total_err[k] > opt.tol * total_abs[k]) ok = false;
    if (ok) {
      converged = true;
      break;
    }
    if (static_cast<int>(panels.size()) >= opt.max_panels) break;

    const double share = 0.5 / static_cast<double>(panels.size());
    std::vector<Panel> next;
    next.reserve(panels.size() * 2);
    for (auto& p : panels) {
      double score = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        if (total_abs[k] > 0.0)
          score = std::max(score, p.err[k] * factor(p, eng.refs(), k) / (opt.tol * total_abs[k]));
      const double width = p.b - p.a;
      if (score > share && width > 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(p.a))) {
        Panel l, r;
        l.a = p.a;
        l.b = 0.5 * (p.a + p.b);
        r.a = l.b;
        r.b = p.b;
        eng.eval_panel(l);
        eng.eval_panel(r);
        next.push_back(std::move(l));
        next.push_back(std::move(r));
      } else {
        next.push_back(std::move(p));
      }
    }
    if (next.size() == panels.size()) break;
    panels = std::move(next);
  }
  Result r = finish(panels, K, eng.refs(), opt.tol);
  r.converged = converged;
  r.evaluations = eng.evaluations();
  return r;
}

}  // namespace warplab::quad
