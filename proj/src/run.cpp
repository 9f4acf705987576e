#include "warplab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "warplab/cutoff.hpp"
#include "warplab/errors.hpp"
#include "warplab/green.hpp"
#include "warplab/pde.hpp"
#include "warplab/serialize.hpp"

#ifndef WARPLAB_VERSION
#define WARPLAB_VERSION "0.0.0"
#endif

namespace warplab {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) {
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return "";
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("table: row width does not match the columns");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_cell(r[i]);
    }
    out += '\n';
  }
  return out;
}

bool CommandResult::violated() const {
  return std::any_of(sections.begin(), sections.end(), [](const Section& s) { return s.verdict == Verdict::violated; });
}

bool RunResult::violated() const {
  return std::any_of(commands.begin(), commands.end(), [](const CommandResult& c) { return c.violated(); });
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

json report_to_json(const InequalityReport& r) {
  json j;
  j["name"] = r.name;
  j["p"] = number(r.p);
  j["beta"] = number(r.beta);
  j["epsilon"] = number(r.epsilon);
  j["sharp_constant"] = r.sharp_constant ? number(*r.sharp_constant) : json(nullptr);
  j["empirical_constant"] = number(r.empirical_constant);
  j["verdict"] = verdict_name(r.verdict);
  j["quadrature_tol"] = r.quadrature_tol;
  j["offending"] = r.offending;
  j["records"] = r.records.size();
  json d = json::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = number(v);
  j["diagnostics"] = d;
  j["notes"] = r.notes;
  return j;
}

double extra(const Record& r, const std::string& key) {
  for (const auto& [k, v] : r.extra)
    if (k == key) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

Section section_from(const std::string& name, const InequalityReport& rep) {
  Section s;
  s.name = name;
  s.verdict = rep.verdict;
  s.offending = rep.offending;
  s.detail = report_to_json(rep);
  return s;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions o;
  o.quad.tol = cfg.quad_tol;
  return o;
}

// Models keyed by (t_max, tol), built on first use.
class Models {
 public:
  Models(const RunConfig& cfg, std::shared_ptr<const ModelManifold> base) : cfg_(cfg) {
    if (base) cache_[{base->t_max(), base->tol()}] = base;
  }
  std::shared_ptr<const ModelManifold> get(double t_max, double tol) {
    auto& slot = cache_[{t_max, tol}];
    if (!slot)
      slot = std::make_shared<const ModelManifold>(
          build_model(cfg_.n, make_profile(cfg_), t_max, tol, parse_method(cfg_.method)));
    return slot;
  }
  std::shared_ptr<const ModelManifold> base() { return get(cfg_.tmax, cfg_.tol); }
  // long enough for an R sweep reaching factor * max R
  std::shared_ptr<const ModelManifold> sweep(double factor) {
    return get(std::max(cfg_.tmax, factor * cfg_.R.back()), cfg_.tol);
  }

 private:
  const RunConfig& cfg_;
  std::map<std::pair<double, double>, std::shared_ptr<const ModelManifold>> cache_;
};

json model_detail(const ModelManifold& M) {
  json d;
  d["n"] = M.n();
  d["profile"] = M.profile().describe();
  d["t_max"] = M.t_max();
  d["tol"] = M.tol();
  d["method"] = ode::method_name(M.method());
  d["nodes"] = M.nodes().size();
  return d;
}

std::vector<double> exhaustion_p_list(const RunConfig& cfg) {
  std::vector<double> ps{1.0, 2.0, 4.0};
  ps.insert(ps.end(), cfg.p.begin(), cfg.p.end());
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

// ---- commands ---------------------------------------------------------------

CommandResult cmd_model(const RunConfig&, Models& models) {
  const auto M = models.base();
  CommandResult r;
  r.command = "model";
  r.table.columns = {"t", "w", "logj", "y", "kappa"};
  for (std::size_t i = 0; i < M->nodes().size(); ++i) {
    const double t = M->nodes()[i];
    r.table.add({t, M->w_nodes()[i], M->logj_nodes()[i], M->y_nodes()[i], M->kappa(t)});
  }
  Section s;
  s.name = "model";
  s.detail = model_detail(*M);
  const double T = M->t_max();
  json asym;
  if (const auto* pl = std::get_if<PowerLaw>(&M->profile().kind())) {
    const double e = pl->alpha / 2.0;
    asym["w_over_sqrt_kappa"] = {M->w(T / 4) / std::sqrt(M->kappa(T / 4)), M->w(T / 2) / std::sqrt(M->kappa(T / 2)),
                                 M->w(T) / std::sqrt(M->kappa(T))};
    asym["y_times_t_pow_half_alpha"] = {M->y(T / 4) * std::pow(T / 4, e), M->y(T / 2) * std::pow(T / 2, e),
                                        M->y(T) * std::pow(T, e)};
  }
  asym["w_at_1"] = M->w(1.0);
  asym["logj_at_1"] = M->logj(1.0);
  s.detail["samples"] = asym;
  r.sections.push_back(s);

  svg::LineChart c;
  c.title = "model: " + M->profile().describe();
  c.x_label = "t";
  c.y_label = "w = j'/j, y";
  c.log_x = c.log_y = true;
  svg::Series w{"w", {}, {}}, y{"y", {}, {}};
  for (const auto& row : r.table.rows) {
    const double t = std::get<double>(row[0]);
    w.x.push_back(t);
    w.y.push_back(std::get<double>(row[1]));
    y.x.push_back(t);
    y.y.push_back(std::get<double>(row[3]));
  }
  c.series = {w, y};
  r.plots.push_back({"model.svg", c});
  return r;
}

CommandResult cmd_green(const RunConfig& cfg, Models& models) {
  const auto M = models.base();
  CommandResult r;
  r.command = "green";
  r.table.columns = {"p", "t", "z", "logG"};
  r.table.keys = 2;
  svg::LineChart c;
  c.title = "log G_p";
  c.x_label = "t";
  c.y_label = "log G";
  c.log_x = true;
  for (double p : cfg.p) {
    Section s;
    s.name = fmt("green[p=%g]", p);
    try {
      const auto G = build_green(M, p);
      const double res = superharmonicity_residual(G);
      s.verdict = res < 1e-7 ? Verdict::holds : Verdict::violated;
      if (s.verdict == Verdict::violated) s.offending = fmt("superharmonicity residual %.3g", res);
      s.detail["p"] = p;
      s.detail["c"] = G.c();
      s.detail["seed_t"] = G.seed_t();
      s.detail["r_K"] = number(G.r_K());
      s.detail["superharmonicity_residual"] = res;
      const double tm = 0.5 * G.seed_t();
      s.detail["c_w_z_at_half_tmax"] = G.c() * M->w(tm) * G.z(tm);
      svg::Series ser{fmt("p=%g", p), {}, {}};
      for (std::size_t i = 0; i < G.nodes().size(); ++i) {
        r.table.add({p, G.nodes()[i], G.z_nodes()[i], G.logG_nodes()[i]});
        ser.x.push_back(G.nodes()[i]);
        ser.y.push_back(G.logG_nodes()[i]);
      }
      c.series.push_back(ser);
    } catch (const ConstructionError& e) {
      s.detail["p"] = p;
      s.detail["not_constructible"] = e.what();
    }
    r.sections.push_back(s);
  }
  r.plots.push_back({"green.svg", c});
  return r;
}

// Hardy and second-order Hardy share the corpus and the Green function.
CommandResult cmd_hardy(const RunConfig& cfg, Models& models, bool second_order) {
  const auto M = models.base();
  CommandResult r;
  r.command = second_order ? "hardy2" : "hardy";
  if (second_order)
    r.table.columns = {"p",   "beta", "index", "label", "lhs", "rhs", "log_scale", "ratio", "mid_weighted_gradient",
                       "mid_green_gradient", "chain_ok"};
  else
    r.table.columns = {"p", "beta", "index", "label", "lhs", "rhs", "log_scale", "ratio", "bound", "margin"};
  r.table.keys = 4;
  const auto opt = verify_options(cfg);
  for (double p : cfg.p) {
    std::optional<GreenFunction> G;
    std::vector<RadialFunction> corpus;
    std::string why;
    try {
      G.emplace(build_green(M, p));
      corpus = generate_corpus({cfg.seed, cfg.count}, *M, G->r_K(), &*G);
    } catch (const ConstructionError& e) {
      why = e.what();
    } catch (const ConfigurationError& e) {
      why = e.what();
    }
    svg::LineChart c;
    c.title = fmt(second_order ? "second-order Hardy ratios, p=%g" : "Hardy ratios, p=%g", p);
    c.x_label = "corpus index";
    c.y_label = "ratio";
    const double bound = std::pow(p / (p - 1.0), p);
    if (!second_order) c.hlines.emplace_back(fmt("(p/(p-1))^p = %.4g", bound), bound);
    for (double beta : beta_list(cfg)) {
      const auto name = fmt(second_order ? "hardy2[p=%g,beta=%.6g]" : "hardy[p=%g,beta=%.6g]", p, beta);
      if (!why.empty()) {
        Section s;
        s.name = name;
        s.detail["not_applicable"] = why;
        r.sections.push_back(s);
        continue;
      }
      const auto rep = second_order ? verify_hardy2(*G, beta, corpus, opt) : verify_hardy(*G, beta, corpus, opt);
      auto s = section_from(name, rep);
      if (second_order && rep.diagnostic("chain_failures") > 0.0) {
        s.verdict = Verdict::violated;
        for (const auto& rec : rep.records)
          if (extra(rec, "chain_ok") == 0.0) {
            s.offending = rec.label;
            break;
          }
      }
      double extremal_max = 0.0;
      svg::Series ser{fmt("beta=%.4g", beta), {}, {}, true};
      for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const auto& rec = rep.records[i];
        const double idx = static_cast<double>(i);
        if (rec.label.rfind("extremal", 0) == 0) extremal_max = std::max(extremal_max, rec.ratio);
        if (second_order)
          r.table.add({p, beta, idx, rec.label, rec.lhs, rec.rhs, rec.log_scale, rec.ratio,
                       extra(rec, "mid_weighted_gradient"), extra(rec, "mid_green_gradient"), extra(rec, "chain_ok")});
        else
          r.table.add({p, beta, idx, rec.label, rec.lhs, rec.rhs, rec.log_scale, rec.ratio, bound,
                       1.0 - rec.ratio / bound});
        ser.x.push_back(idx);
        ser.y.push_back(rec.ratio);
      }
      if (!second_order) {
        s.detail["extremal_max_ratio"] = extremal_max;
        s.detail["extremal_fraction_of_bound"] = extremal_max / bound;
      }
      s.detail["r_K"] = number(G->r_K());
      c.series.push_back(ser);
      r.sections.push_back(s);
    }
    r.plots.push_back({fmt(second_order ? "hardy2_p%g.svg" : "hardy_p%g.svg", p), c});
  }
  return r;
}

CommandResult cmd_embed(const RunConfig& cfg, Models& models) {
  const auto M = models.sweep(2.5);
  const double alpha = supported_weight_exponent(*M);
  if (!(alpha >= 0.0)) throw ConfigurationError("embed: the model supports no growing weight");
  CommandResult r;
  r.command = "embed";
  r.table.columns = {"p", "order", "kind", "label", "R", "lhs", "rhs", "log_scale", "ratio"};
  r.table.keys = 5;
  TestCorpus tc{cfg.seed, cfg.count};
  tc.extremal = false;
  const auto corpus = generate_corpus(tc, *M, 0.5);
  svg::LineChart c;
  c.title = "weight embedding tail sweep";
  c.x_label = "R";
  c.y_label = "||omega_R f||_p";
  c.log_x = c.log_y = true;
  for (double p : cfg.p) {
    for (int order : {2, 1}) {
      EmbeddingOptions eo;
      eo.p = p;
      eo.alpha = order == 2 ? alpha : 0.5 * alpha;
      eo.first_order = order == 1;
      eo.sweep_R = cfg.R;
      eo.verify = verify_options(cfg);
      const double m = cfg.tail_m + eo.alpha;
      const auto sweep_fn = tail_surrogate(*M, p, m);
      const auto rep = verify_weight_embedding(*M, corpus, sweep_fn, eo);
      auto s = section_from(fmt("embed[p=%g,order=%g]", p, order), rep);
      s.detail["weight_exponent"] = eo.alpha;
      s.detail["sweep_function"] = sweep_fn.label();
      s.detail["model"] = model_detail(*M);
      r.sections.push_back(s);
      for (const auto& rec : rep.records)
        r.table.add({p, static_cast<double>(order), std::string("member"), rec.label, std::monostate{}, rec.lhs,
                     rec.rhs, rec.log_scale, rec.ratio});
      svg::Series ser{fmt("p=%g order=%g", p, order), {}, {}, true};
      for (double R : cfg.R) {
        const double v = rep.diagnostic(fmt("sweep[R=%g]", R));
        r.table.add({p, static_cast<double>(order), std::string("sweep"), sweep_fn.label(), R, v, std::monostate{},
                     0.0, std::monostate{}});
        ser.x.push_back(R);
        ser.y.push_back(v);
      }
      c.series.push_back(ser);
    }
  }
  r.plots.push_back({"embed_sweep.svg", c});
  return r;
}

CommandResult cmd_cz2(const RunConfig& cfg, Models& models) {
  const auto M = models.base();
  CommandResult r;
  r.command = "cz2";
  r.table.columns = {"index", "label", "hessian", "laplacian_plus_value", "log_scale", "ratio", "bochner_residual"};
  r.table.keys = 2;
  TestCorpus tc{cfg.seed, cfg.count};
  tc.extremal = false;
  const auto corpus = generate_corpus(tc, *M, 0.5);
  CZOptions co;
  co.epsilons = cfg.eps;
  if (const auto* pl = std::get_if<PowerLaw>(&M->profile().kind())) co.weight_beta = pl->alpha;
  co.verify = verify_options(cfg);
  const auto rep = verify_cz2(*M, corpus, co);
  auto s = section_from("cz2", rep);
  const double bochner = rep.diagnostic("max_bochner_residual");
  s.verdict = bochner < 1e-6 ? Verdict::holds : Verdict::violated;
  if (s.verdict == Verdict::violated)
    for (const auto& rec : rep.records)
      if (extra(rec, "bochner_residual") >= 1e-6) {
        s.offending = rec.label;
        break;
      }
  s.detail["weight_beta"] = co.weight_beta;
  r.sections.push_back(s);
  svg::LineChart c;
  c.title = "CZ(2) ratios";
  c.x_label = "corpus index";
  c.y_label = "||Hess f|| / (||Lap f|| + ||f||)";
  svg::Series ser{"ratio", {}, {}, true};
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const auto& rec = rep.records[i];
    r.table.add({static_cast<double>(i), rec.label, rec.lhs, rec.rhs, rec.log_scale, rec.ratio,
                 extra(rec, "bochner_residual")});
    ser.x.push_back(static_cast<double>(i));
    ser.y.push_back(rec.ratio);
  }
  c.series.push_back(ser);
  r.plots.push_back({"cz2.svg", c});
  return r;
}

CommandResult cmd_cutoffs(const RunConfig& cfg, Models& models) {
  const auto M = models.sweep(2.0);
  CommandResult r;
  r.command = "cutoffs";
  r.table.columns = {"kind",         "R", "beta", "gamma", "sup_gradient", "sup_second", "gradient_certificate",
                     "second_certificate"};
  r.table.keys = 2;
  const auto* pl = std::get_if<PowerLaw>(&M->profile().kind());
  const double beta = pl ? pl->alpha : 0.0;
  std::vector<double> g, h;
  json certs = json::array();
  for (double R : cfg.R) {
    const auto chi = make_hessian_cutoff(R, M->t_max());
    const auto cert = certify_cutoff(*M, chi, R, beta);
    r.table.add({std::string("hessian"), R, beta, std::monostate{}, cert.sup_gradient, cert.sup_hessian,
                 cert.gradient_certificate, cert.hessian_certificate});
    g.push_back(cert.gradient_certificate);
    h.push_back(cert.hessian_certificate);
    certs.push_back({{"R", R},
                     {"sup_gradient", cert.sup_gradient},
                     {"sup_hessian", cert.sup_hessian},
                     {"gradient_certificate", cert.gradient_certificate},
                     {"hessian_certificate", cert.hessian_certificate},
                     {"argmax_hessian", cert.argmax_hessian}});
  }
  Section s;
  s.name = "hessian-cutoffs";
  s.detail["beta"] = beta;
  s.detail["certificates"] = certs;
  s.detail["gradient_spread"] = spread(g);
  s.detail["hessian_spread"] = spread(h);
  s.detail["model"] = model_detail(*M);
  if (pl) {
    const bool ok = spread(g) < 2.0 && spread(h) < 2.0;
    s.verdict = ok ? Verdict::holds : Verdict::violated;
    if (!ok) s.offending = "certificate spread across R exceeds 2";
  } else {
    s.detail["note"] = "scaling exponent only defined for power laws; report-only";
  }
  r.sections.push_back(s);

  svg::LineChart c;
  c.title = "cutoff certificates";
  c.x_label = "R";
  c.y_label = "certificate";
  c.log_x = true;
  c.series.push_back({"sup|chi'| R", cfg.R, g, true});
  c.series.push_back({fmt("sup|Hess chi| R^(1-%g/2)", beta), cfg.R, h, true});

  std::optional<LambdaScale> lambda;
  try {
    lambda = LambdaScale::from_profile(M->profile());
  } catch (const ConfigurationError&) {
  }
  if (lambda) {
    Section ls;
    ls.name = "laplacian-cutoffs";
    json rows = json::array();
    std::vector<double> gl, lap;
    for (double R : cfg.R) {
      const auto lc = make_laplacian_cutoff(*M, *lambda, R, 2.0);
      r.table.add({std::string("laplacian"), R, std::monostate{}, lc.gamma, lc.sup_gradient_lambda / lc.lambda_R,
                   lc.sup_laplacian, lc.sup_gradient_lambda, lc.sup_laplacian});
      gl.push_back(lc.sup_gradient_lambda);
      lap.push_back(lc.sup_laplacian);
      rows.push_back({{"R", R},
                      {"H", lc.H},
                      {"lambda_R", lc.lambda_R},
                      {"sup_gradient_lambda", lc.sup_gradient_lambda},
                      {"sup_laplacian", lc.sup_laplacian}});
    }
    ls.detail["lambda"] = lambda->describe();
    ls.detail["certificates"] = rows;
    ls.detail["gradient_lambda_spread"] = spread(gl);
    ls.detail["laplacian_max"] = *std::max_element(lap.begin(), lap.end());
    r.sections.push_back(ls);
    c.series.push_back({"sup|chi'| lambda(R)", cfg.R, gl, true});
    c.series.push_back({"sup|Lap chi|", cfg.R, lap, true});
  }
  r.plots.push_back({"cutoffs.svg", c});
  return r;
}

CommandResult cmd_density(const RunConfig& cfg, Models& models) {
  const auto M = models.sweep(2.5);
  CommandResult r;
  r.command = "density";
  r.table.columns = {"p", "m", "R", "value", "gradient", "hessian"};
  r.table.keys = 3;
  svg::LineChart c;
  c.title = "density remainders";
  c.x_label = "R";
  c.y_label = "remainder norm";
  c.log_x = c.log_y = true;
  for (double p : cfg.p) {
    const auto f = tail_surrogate(*M, p, cfg.tail_m);
    const auto rep = density_probe(*M, f, p, cfg.R, verify_options(cfg));
    auto s = section_from(fmt("density[p=%g]", p), rep);
    s.detail["function"] = f.label();
    s.detail["model"] = model_detail(*M);
    r.sections.push_back(s);
    svg::Series sv{fmt("value p=%g", p), {}, {}, true}, sg{fmt("gradient p=%g", p), {}, {}, true},
        sh{fmt("hessian p=%g", p), {}, {}, true};
    for (const auto& rec : rep.records) {
      const double R = extra(rec, "R");
      r.table.add({p, cfg.tail_m, R, extra(rec, "value"), extra(rec, "gradient"), extra(rec, "hessian")});
      for (auto* ser : {&sv, &sg, &sh}) ser->x.push_back(R);
      sv.y.push_back(extra(rec, "value"));
      sg.y.push_back(extra(rec, "gradient"));
      sh.y.push_back(extra(rec, "hessian"));
    }
    c.series.insert(c.series.end(), {sv, sg, sh});
  }
  r.plots.push_back({"density.svg", c});
  return r;
}

CommandResult cmd_ppp(const RunConfig& cfg, Models& models) {
  const auto M = models.sweep(2.0);
  CommandResult r;
  r.command = "ppp";
  r.table.columns = {"part",          "R",    "p", "norm_v", "norm_psi", "norm_inf_v", "term_laplacian_v",
                     "term_laplacian_chi", "term_gradient", "term_zero_order", "total"};
  r.table.keys = 3;
  const std::monostate E;

  // exhaustion by nested balls
  const auto psi = plateau_bump("psi[1,2]", 1.0, 2.0, 0.25, 0.25);
  ExhaustionOptions eo;
  eo.h_base = 1e-3;
  eo.check_refinement = true;
  const auto ps = exhaustion_p_list(cfg);
  const auto sol = solve_dirichlet_exhaustion(*M, psi, cfg.R, ps, eo);
  Section ex;
  ex.name = "exhaustion";
  ex.verdict = Verdict::holds;
  auto fail = [&](const std::string& why) {
    if (ex.verdict == Verdict::holds) ex.offending = why;
    ex.verdict = Verdict::violated;
  };
  for (std::size_t k = 0; k < cfg.R.size(); ++k) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      r.table.add({std::string("exhaustion"), cfg.R[k], ps[i], sol.norm_p[k][i], sol.psi_norm_p[i],
                   sol.norm_inf[k], E, E, E, E, E});
      if (sol.norm_p[k][i] > sol.psi_norm_p[i] + 1e-8) fail(fmt("L^p bound fails at R=%g, p=%g", cfg.R[k], ps[i]));
    }
    if (sol.norm_inf[k] > sol.psi_norm_inf + 1e-8) fail(fmt("sup bound fails at R=%g", cfg.R[k]));
  }
  if (sol.monotonicity_violation > 1e-10) fail("exhaustion is not monotone");
  if (!sol.m_matrix) fail("system matrix is not an M-matrix");
  if (!sol.converged) fail("exhaustion limit not converged");
  if (sol.refinement_change > 1e-6) fail("refined mesh disagrees");
  ex.detail["psi"] = psi.label();
  ex.detail["mesh_nodes"] = sol.mesh.size();
  ex.detail["monotonicity_violation"] = sol.monotonicity_violation;
  ex.detail["limit_change"] = sol.limit_change;
  ex.detail["converged"] = sol.converged;
  ex.detail["refinement_change"] = sol.refinement_change;
  ex.detail["m_matrix"] = sol.m_matrix;
  json grad = json::array();
  for (const auto& g : gradient_estimate_probe(sol, cfg.R.size() - 1, {1.25, 1.5, 2.0}))
    grad.push_back({{"q", g.q}, {"gradient_norm", g.gradient_norm}, {"rhs", g.rhs}, {"ratio", g.ratio}});
  ex.detail["gradient_estimate"] = grad;
  r.sections.push_back(ex);

  // positivity and the pairing sweep
  const double R_ex = 2.0 * cfg.R.back();
  const double p = cfg.p.front();
  svg::LineChart c;
  c.title = "pairing terms with cutoffs";
  c.x_label = "R";
  c.y_label = "|term|";
  c.log_x = c.log_y = true;
  struct Probe {
    std::string name;
    RadialFunction mu;
  };
  const std::vector<Probe> probes{{"bump[1,2]", plateau_bump("mu[1,2]", 1.0, 2.0, 0.25, 0.25)},
                                  {"zero", zero_function("mu=0")}};
  const auto psi2 = plateau_bump("psi[2,3]", 2.0, 3.0, 0.25, 0.25);
  ExhaustionOptions po;
  po.h_base = 1e-3;
  for (const auto& pr : probes) {
    const auto rep = positivity_probe(*M, pr.mu, psi2, p, cfg.R, R_ex, po);
    Section s;
    s.name = "positivity[mu=" + pr.name + "]";
    s.verdict = rep.positive && rep.pairing_decays ? Verdict::holds : Verdict::violated;
    if (!rep.positive) s.offending = fmt("min u = %.3g", rep.u_min);
    else if (!rep.pairing_decays) s.offending = "cutoff pairing terms do not decay";
    s.detail = {{"u_min", rep.u_min},
                {"u_max", rep.u_max},
                {"u_norm_p", rep.u_norm_p},
                {"p", p},
                {"R_solve", R_ex},
                {"pairing_reference", rep.pairing_reference},
                {"final_cutoff_fraction", rep.final_cutoff_fraction}};
    r.sections.push_back(s);
    svg::Series s2{"|Lap chi term| mu=" + pr.name, {}, {}, true}, s3{"|grad term| mu=" + pr.name, {}, {}, true};
    for (const auto& row : rep.rows) {
      r.table.add({std::string("pairing[mu=" + pr.name + "]"), row.R, p, E, E, E, row.term_laplacian_v,
                   row.term_laplacian_chi, row.term_gradient, row.term_zero_order, row.total});
      s2.x.push_back(row.R);
      s2.y.push_back(std::abs(row.term_laplacian_chi));
      s3.x.push_back(row.R);
      s3.y.push_back(std::abs(row.term_gradient));
    }
    c.series.insert(c.series.end(), {s2, s3});
  }
  r.plots.push_back({"ppp.svg", c});
  return r;
}

CommandResult cmd_liyau(const RunConfig& cfg, Models& models) {
  const auto lambda = LambdaScale::from_profile(make_profile(cfg));
  const auto M = models.sweep(2.0);
  CommandResult r;
  r.command = "liyau";
  r.table.columns = {"R", "gamma", "lambda_R", "ratio"};
  const double r0 = std::min(1.0, 0.5 * cfg.R.front());
  const auto v = exterior_eigenfunction(M, r0);
  std::vector<double> ratios;
  for (double R : cfg.R) {
    const double q = li_yau_ratio(v, lambda, R, 2.0);
    ratios.push_back(q);
    r.table.add({R, 2.0, lambda.value(R), q});
  }
  Section s;
  s.name = "li-yau";
  s.detail["lambda"] = lambda.describe();
  s.detail["r0"] = r0;
  s.detail["ratios"] = ratios;
  s.detail["spread"] = spread(ratios);
  double res = 0.0;
  const double a = r0 + 1.0, b = M->t_max() - 1.0;
  for (int i = 0; i <= 2000 && b > a; ++i) res = std::max(res, v.residual(a + (b - a) * i / 2000.0));
  s.detail["max_residual"] = res;
  const double th = 0.5 * M->t_max();
  s.detail["s_over_laplacian_distance_at_half_tmax"] = std::abs(v.s(th)) / ((M->n() - 1) * M->w(th));
  s.detail["model"] = model_detail(*M);
  s.verdict = spread(ratios) < 2.0 ? Verdict::holds : Verdict::violated;
  if (s.verdict == Verdict::violated) s.offending = "Li-Yau ratio varies by more than a factor 2";
  r.sections.push_back(s);
  svg::LineChart c;
  c.title = "Li-Yau ratio sup |v'|/(lambda(R) v)";
  c.x_label = "R";
  c.y_label = "ratio";
  c.log_x = true;
  c.series.push_back({"gamma=2", cfg.R, ratios, true});
  r.plots.push_back({"liyau.svg", c});
  return r;
}

CommandResult cmd_stochastic(const RunConfig& cfg, Models& models) {
  const auto M = models.get(std::max(cfg.tmax, 128.0), std::min(cfg.tol, 1e-11));
  const auto d = classify_stochastic_completeness(*M);
  CommandResult r;
  r.command = "stochastic";
  r.table.columns = {"lo", "hi", "increment", "ratio"};
  std::vector<double> his;
  for (std::size_t i = 0; i < d.increments.size(); ++i) {
    const double lo = d.T / std::pow(2.0, static_cast<double>(d.increments.size() - i));
    r.table.add({lo, 2.0 * lo, d.increments[i], i == 0 ? Cell{} : Cell{d.increment_ratios[i - 1]}});
    his.push_back(2.0 * lo);
  }
  Section s;
  s.name = "stochastic";
  s.detail["verdict"] = completeness_name(d.verdict);
  s.detail["T"] = d.T;
  s.detail["u_T"] = d.u_T;
  s.detail["increments"] = d.increments;
  s.detail["increment_ratios"] = d.increment_ratios;
  s.detail["identity_residual"] = d.identity_residual;
  s.detail["model"] = model_detail(*M);
  s.verdict = d.identity_residual < 1e-9 ? Verdict::holds : Verdict::violated;
  if (s.verdict == Verdict::violated) s.offending = fmt("identity residual %.3g", d.identity_residual);
  r.sections.push_back(s);
  svg::LineChart c;
  c.title = std::string("increments of u (") + completeness_name(d.verdict) + ")";
  c.x_label = "interval end";
  c.y_label = "int y over [T/2, T]";
  c.log_x = c.log_y = true;
  c.series.push_back({"increment", his, d.increments, true});
  r.plots.push_back({"stochastic.svg", c});
  return r;
}

CommandResult dispatch(const std::string& command, const RunConfig& cfg, Models& models) {
  if (command == "model") return cmd_model(cfg, models);
  if (command == "green") return cmd_green(cfg, models);
  if (command == "hardy") return cmd_hardy(cfg, models, false);
  if (command == "hardy2") return cmd_hardy(cfg, models, true);
  if (command == "embed") return cmd_embed(cfg, models);
  if (command == "cz2") return cmd_cz2(cfg, models);
  if (command == "cutoffs") return cmd_cutoffs(cfg, models);
  if (command == "density") return cmd_density(cfg, models);
  if (command == "ppp") return cmd_ppp(cfg, models);
  if (command == "liyau") return cmd_liyau(cfg, models);
  if (command == "stochastic") return cmd_stochastic(cfg, models);
  throw ConfigurationError("unknown command '" + command + "'");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string tidy_label(const Table& t, const std::vector<Cell>& row) {
  std::string label;
  for (std::size_t i = 0; i < t.keys && i < row.size(); ++i) {
    if (std::holds_alternative<std::monostate>(row[i])) continue;
    if (!label.empty()) label += ';';
    label += t.columns[i] + '=' + (std::holds_alternative<std::string>(row[i]) ? std::get<std::string>(row[i])
                                                                             : format_number(std::get<double>(row[i])));
  }
  return label;
}

}  // namespace

CommandResult run_command(const std::string& command, const RunConfig& cfg,
                          std::shared_ptr<const ModelManifold> model) {
  Models models(cfg, std::move(model));
  return dispatch(command, cfg, models);
}

RunResult run(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  RunResult res;
  res.config = cfg;
  Models models(cfg, nullptr);
  res.model = models.base();
  std::vector<std::string> commands;
  if (cfg.command == "all") {
    for (const auto& c : command_names())
      if (c != "all") commands.push_back(c);
  } else {
    commands.push_back(cfg.command);
  }
  for (const auto& c : commands) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.command == "all") {
      try {
        res.commands.push_back(dispatch(c, cfg, models));
      } catch (const ConfigurationError& e) {
        CommandResult skipped;
        skipped.command = c;
        skipped.skipped = e.what();
        res.commands.push_back(skipped);
      }
    } else {
      res.commands.push_back(dispatch(c, cfg, models));
    }
    if (log) {
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto& cr = res.commands.back();
      *log << c << ": "
           << (!cr.skipped.empty() ? "skipped (" + cr.skipped + ")" : cr.violated() ? "VIOLATED" : "ok") << " ["
           << fmt("%.2f", dt) << " s]\n";
      for (const auto& s : cr.sections) {
        if (s.detail.contains("verdict")) *log << "  " << s.name << ": " << s.detail["verdict"].get<std::string>() << '\n';
        if (s.verdict == Verdict::violated) *log << "  " << s.name << " violated: " << s.offending << '\n';
      }
    }
  }
  return res;
}

json report_json(const RunResult& r) {
  json j;
  j["schema_version"] = 1;
  j["tool"] = "warplab";
  j["version"] = WARPLAB_VERSION;
  j["command"] = r.config.command;
  j["config_hash"] = hex64(config_hash(r.config));
  j["model"] = model_detail(*r.model);
  j["status"] = r.violated() ? "violated" : "holds";
  j["exit_status"] = r.exit_status();
  json cmds = json::array();
  for (const auto& c : r.commands) {
    json cj;
    cj["command"] = c.command;
    cj["skipped"] = c.skipped.empty() ? json(nullptr) : json(c.skipped);
    json secs = json::array();
    for (const auto& s : c.sections) {
      json sj = s.detail;
      sj["name"] = s.name;
      sj["status"] = verdict_name(s.verdict);
      sj["asserted"] = s.verdict != Verdict::report_only;
      sj["offending"] = s.offending;
      secs.push_back(sj);
    }
    cj["sections"] = secs;
    cj["columns"] = c.table.columns;
    cj["rows"] = c.table.rows.size();
    cmds.push_back(cj);
  }
  j["commands"] = cmds;
  return j;
}

std::string records_csv(const RunResult& r) {
  if (r.config.command != "all") return r.commands.front().table.to_csv();
  std::string out = "command,label,field,value\n";
  for (const auto& c : r.commands) {
    const auto& t = c.table;
    for (const auto& row : t.rows) {
      const std::string label = format_cell(tidy_label(t, row));
      for (std::size_t i = t.keys; i < row.size(); ++i) {
        if (std::holds_alternative<std::monostate>(row[i])) continue;
        out += c.command + ',' + label + ',' + t.columns[i] + ',' + format_cell(row[i]) + '\n';
      }
    }
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_bundle(const RunResult& r, const std::string& started_utc, double elapsed_seconds) {
  const fs::path dir(r.config.out);
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files;
  auto emit = [&](const std::string& name, const std::string& text) {
    fs::create_directories((dir / name).parent_path());
    write_file(dir / name, text);
    files.emplace_back(name, hex64(fnv1a(text)));
  };
  emit("model.json", model_to_json(*r.model).dump(1) + "\n");
  emit("report.json", report_json(r).dump(2) + "\n");
  emit("records.csv", records_csv(r));
  if (r.config.command == "all")
    for (const auto& c : r.commands)
      if (c.skipped.empty()) emit("records_" + c.command + ".csv", c.table.to_csv());
  if (r.config.plot)
    for (const auto& c : r.commands)
      for (const auto& p : c.plots) emit("plots/" + p.file, svg::render(p.chart));

  json m;
  m["schema_version"] = 1;
  m["tool"] = "warplab";
  m["version"] = WARPLAB_VERSION;
  m["json_library"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                      "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  m["command"] = r.config.command;
  m["config"] = to_json(r.config);
  m["config_hash"] = hex64(config_hash(r.config));
  m["started_utc"] = started_utc;
  m["finished_utc"] = utc_now();
  m["elapsed_seconds"] = elapsed_seconds;
  m["exit_status"] = r.exit_status();
  json fj = json::array();
  for (const auto& [name, h] : files) fj.push_back({{"file", name}, {"fnv1a", h}});
  m["files"] = fj;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

int execute(const RunConfig& cfg, std::ostream& log) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run(cfg, &log);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_bundle(res, started, dt);
  log << (res.violated() ? "VIOLATED" : "all asserted claims hold") << "; output in " << cfg.out << '\n';
  return res.exit_status();
}

}  // namespace warplab
