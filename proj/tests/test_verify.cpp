#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "warplab/errors.hpp"
#include "warplab/verify.hpp"

using namespace warplab;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

std::shared_ptr<const ModelManifold> model(int n, const CurvatureProfile& P, double t_max, double tol = 1e-10) {
  return std::make_shared<const ModelManifold>(build_model(n, P, t_max, tol));
}

std::vector<RadialFunction> corpus(const ModelManifold& M, const GreenFunction& G, std::size_t size,
                                   std::uint64_t seed = 42) {
  TestCorpus spec;
  spec.seed = seed;
  spec.size = size;
  return generate_corpus(spec, M, G.r_K(), &G);
}

}  // namespace

TEST_CASE("hardy ratio of a bump matches a dense Simpson oracle") {
  const auto M = model(3, CurvatureProfile::flat(), 10.0);
  const auto G = build_green(M, 2.0);
  const auto f = plateau_bump("b", 3.0, 7.0, 1.0, 1.0);
  // z = t: lhs = 4 pi int f^2, rhs = 4 pi int f'^2 t^2
  auto pieces = [&](const std::function<double(double)>& g) {
    return simpson(g, 3.0, 4.0, 20000) + simpson(g, 4.0, 6.0, 20000) + simpson(g, 6.0, 7.0, 20000);
  };
  const double lhs = pieces([&](double t) { return std::pow(f.value(t), 2); });
  const double rhs = pieces([&](double t) { return std::pow(f.derivative(t) * t, 2); });
  const auto rep = verify_hardy(G, 0.0, {f});
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].ratio == doctest::Approx(lhs / rhs).epsilon(1e-8));
  CHECK(rep.records[0].ratio <= 4.0);
  CHECK(rep.verdict == Verdict::holds);
}

TEST_CASE("hardy on a flat corpus") {
  const auto M = model(3, CurvatureProfile::flat(), 30.0);
  const auto G = build_green(M, 2.0);
  const auto rep = verify_hardy(G, 0.0, corpus(*M, G, 50));
  CHECK(rep.records.size() == 50);
  CHECK(rep.verdict == Verdict::holds);
  CHECK(rep.empirical_constant <= 4.0);
  CHECK(rep.empirical_constant > 0.0);
}

TEST_CASE("zero member has ratio 0") {
  const auto M = model(3, CurvatureProfile::power_law(1.0, 1.0), 20.0);
  const auto G = build_green(M, 2.0);
  const auto rep = verify_hardy(G, 0.5, {zero_function()});
  CHECK(rep.records[0].ratio == 0.0);
  CHECK(rep.verdict == Verdict::holds);
  const auto rep2 = verify_hardy2(G, 0.0, {zero_function()});
  CHECK(rep2.records[0].ratio == 0.0);
  const auto cz = verify_cz2(*M, {zero_function()});
  CHECK(cz.records[0].ratio == 0.0);
}

TEST_CASE("hardy support precondition names the member") {
  const auto M = model(3, CurvatureProfile::flat(), 20.0);
  const auto G = build_green(M, 2.0);
  try {
    (void)verify_hardy(G, 0.0, {plateau_bump("inside-rK", 1.0, 5.0, 1.0, 1.0)});
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("inside-rK") != std::string::npos);
  }
  CHECK_THROWS_AS(verify_hardy(G, 0.0, {plateau_bump("far", 5.0, 19.0, 1.0, 1.0)}), PreconditionError);
  CHECK_THROWS_AS(verify_hardy(G, -1.0, {}), ConfigurationError);
}

TEST_CASE("verdict follows the sharp constant") {
  InequalityReport r;
  r.sharp_constant = 4.0;
  r.quadrature_tol = 1e-10;
  r.records = {Record{"a", 1, 1, 3.9}, Record{"b", 1, 1, 4.0 + 1e-12}};
  finalize(r);
  CHECK(r.verdict == Verdict::holds);
  CHECK(r.empirical_constant == doctest::Approx(4.0));
  r.records.push_back(Record{"c", 1, 1, 4.01});
  finalize(r);
  CHECK(r.verdict == Verdict::violated);
  CHECK(r.offending == "c");
  InequalityReport free;
  free.records = {Record{"x", 1, 1, 100.0}};
  finalize(free);
  CHECK(free.verdict == Verdict::report_only);
}

TEST_CASE("near-extremal family approaches the sharp constant") {
  for (double alpha : {0.0, 2.0}) {
    const auto M = model(3, CurvatureProfile::power_law(1.0, alpha), 40.0);
    const auto G = build_green(M, 2.0);
    const double s0 = G.s(G.r_K());
    double prev = 0.0;
    for (double L : {2.0, 8.0, 32.0}) {
      const auto f = extremal_member("ext", G, s0, s0 + L, 0.25 * L);
      const double r = verify_hardy(G, 0.0, {f}).records[0].ratio;
      CAPTURE(alpha);
      CAPTURE(L);
      CHECK(r > prev);
      CHECK(r <= 4.0);
      prev = r;
    }
    CHECK(prev >= 2.0);
  }
}

TEST_CASE("hardy is insensitive to the green seed position") {
  const auto M = model(3, CurvatureProfile::power_law(1.0, 1.0), 40.0);
  const auto G = build_green(M, 3.0);
  const auto G2 = build_green(M, 3.0, 36.0);
  const auto c = corpus(*M, G, 20);
  const auto a = verify_hardy(G, 1.0 / 3.0, c);
  const auto b = verify_hardy(G2, 1.0 / 3.0, c);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(std::abs(a.records[i].ratio - b.records[i].ratio) <= 1e-6 * a.records[i].ratio);
}

TEST_CASE("second-order hardy chain") {
  for (double alpha : {0.0, 1.0, 2.0}) {
    const auto M = model(3, CurvatureProfile::power_law(1.0, alpha), 40.0);
    const auto G = build_green(M, 2.0);
    const auto rep = verify_hardy2(G, alpha / (alpha + 2.0), corpus(*M, G, 30));
    CAPTURE(alpha);
    CHECK(rep.verdict == Verdict::report_only);
    CHECK(rep.diagnostic("chain_failures") == 0.0);
    CHECK(std::isfinite(rep.diagnostic("C_log")));
    CHECK(rep.empirical_constant <= rep.diagnostic("chain_constant") * (1.0 + 1e-8));
  }
}

TEST_CASE("bochner identity on the corpus") {
  for (double alpha : {0.0, 1.0, 2.0}) {
    const auto M = model(3, CurvatureProfile::power_law(1.0, alpha), 40.0);
    TestCorpus spec;
    spec.size = 40;
    spec.extremal = false;
    CZOptions opt;
    opt.epsilons = {0.5, 1.0};
    opt.weight_beta = alpha;
    const auto rep = verify_cz2(*M, generate_corpus(spec, *M, 0.5), opt);
    CAPTURE(alpha);
    CHECK(rep.diagnostic("max_bochner_residual") < 1e-6);
    for (const auto& r : rep.records) CHECK(r.ratio > 0.0);
    CHECK(rep.diagnostic("A1[eps=0.5,A2=1]") >= 0.0);
  }
}

TEST_CASE("cz2 is exact for flat plateaus") {
  // on flat space int |Hess f|^2 = int (Delta f)^2
  const auto M = model(3, CurvatureProfile::flat(), 20.0);
  const auto rep = verify_cz2(*M, {plateau_bump("b", 2.0, 9.0, 2.0, 2.0)});
  CHECK(rep.diagnostic("max_bochner_residual") < 1e-10);
}

TEST_CASE("weight embedding sweep decays") {
  const auto M = model(3, CurvatureProfile::power_law(1.0, 1.0), 100.0);
  CHECK(supported_weight_exponent(*M) == doctest::Approx(1.0));
  EmbeddingOptions eo;
  eo.p = 2.0;
  eo.alpha = 1.0;
  eo.sweep_R = {5.0, 10.0, 20.0, 40.0};
  TestCorpus spec;
  spec.size = 10;
  spec.extremal = false;
  const auto rep = verify_weight_embedding(*M, generate_corpus(spec, *M, 0.5), tail_surrogate(*M, 2.0, 7.0), eo);
  CHECK(rep.records.size() == 10);
  CHECK(rep.verdict == Verdict::holds);
  CHECK(rep.diagnostic("sweep_final_over_initial") < 1e-3);
  eo.alpha = 3.0;
  CHECK_THROWS_AS(verify_weight_embedding(*M, {}, zero_function(), eo), ConfigurationError);
  eo.alpha = 1.0;
  eo.sweep_R = {60.0};
  CHECK_THROWS_AS(verify_weight_embedding(*M, {}, tail_surrogate(*M, 2.0, 7.0), eo), RangeError);
}

TEST_CASE("density probe") {
  const auto M = model(3, CurvatureProfile::power_law(1.0, 1.0), 160.0);
  const auto rep = density_probe(*M, tail_surrogate(*M, 2.0, 6.0), 2.0, {8.0, 16.0, 32.0, 64.0});
  CHECK(rep.verdict == Verdict::holds);
  CHECK(rep.records.size() == 4);
  for (const char* k : {"value_final_over_initial", "gradient_final_over_initial", "hessian_final_over_initial"})
    CHECK(rep.diagnostic(k) < 1e-3);
  const auto inner = density_probe(*M, plateau_bump("inner", 1.0, 6.0, 1.0, 1.0), 2.0, {8.0, 16.0});
  for (const auto& r : inner.records) CHECK(r.lhs == 0.0);
  CHECK_THROWS_AS(density_probe(*M, zero_function(), 2.0, {100.0}), RangeError);
}

TEST_CASE("enrichment change") {
  CHECK(enrichment_change(2.0, 2.2) == doctest::Approx(0.2 / 2.2));
  CHECK(enrichment_change(0.0, 0.0) == 0.0);
}
