#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "warplab/config.hpp"
#include "warplab/errors.hpp"
#include "warplab/run.hpp"
#include "warplab/serialize.hpp"
#include "warplab/svg.hpp"

using namespace warplab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("warplab-test-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config round-trips through json") {
  RunConfig c;
  c.alpha = 2.5;
  c.p = {2.0};
  c.R = {4.0, 8.0};
  c.profile = "tabulated";
  c.table = {{0.0, 1.0}, {10.0, 2.0}};
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("config merge precedence and errors") {
  RunConfig c;
  merge_config(c, json{{"alpha", 0.0}, {"p", 2.0}});
  CHECK(c.alpha == 0.0);
  REQUIRE(c.p.size() == 1);
  CHECK(c.p[0] == 2.0);
  CHECK(c.n == 3);
  merge_config(c, json{{"n", 2}});
  CHECK(c.alpha == 0.0);
  CHECK(c.n == 2);
  CHECK_THROWS_AS(merge_config(c, json{{"bogus", 1}}), ConfigurationError);
  CHECK_THROWS_AS(merge_config(c, json{{"n", "three"}}), ConfigurationError);
  CHECK_THROWS_AS(merge_config(c, json{{"schema_version", 2}}), ConfigurationError);
  CHECK_THROWS_AS(merge_config(c, json::array()), ConfigurationError);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  c.n = 1;
  CHECK_THROWS_AS(validate(c), ConfigurationError);
  c = RunConfig{};
  c.command = "nope";
  CHECK_THROWS_AS(validate(c), ConfigurationError);
  c = RunConfig{};
  c.method = "euler";
  CHECK_THROWS_AS(validate(c), ConfigurationError);
  CHECK_THROWS_AS(parse_method("euler"), ConfigurationError);
  CHECK(parse_method("dopri5") == ode::Method::dopri5);
}

TEST_CASE("config file loading allows comments") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << "{\n  // exponent\n  \"alpha\": 0,\n  \"count\": 12\n}\n";
  }
  const auto c = load_config((dir / "c.json").string());
  CHECK(c.alpha == 0.0);
  CHECK(c.count == 12);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigurationError);
}

TEST_CASE("config hash ignores output keys") {
  RunConfig a, b;
  b.out = "elsewhere";
  b.plot = true;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 43;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("default beta list and profiles") {
  RunConfig c;
  c.alpha = 2.0;
  const auto b = beta_list(c);
  REQUIRE(b.size() == 2);
  CHECK(b[1] == doctest::Approx(0.5));
  c.alpha = 0.0;
  CHECK(beta_list(c).size() == 1);
  c.profile = "flat";
  CHECK(make_profile(c).is_flat());
  c.profile = "iterated-log";
  c.k = 1;
  CHECK(std::holds_alternative<IteratedLog>(make_profile(c).kind()));
}

TEST_CASE("model and green serialization round-trip") {
  const auto P = CurvatureProfile::iterated_log(0.5, 1, 6.0);
  const auto M = std::make_shared<const ModelManifold>(build_model(3, P, 20.0, 1e-10));
  const auto j = model_to_json(*M);
  CHECK(j["schema_version"] == kModelSchemaVersion);
  const auto back = model_from_json(json::parse(j.dump()));
  CHECK(back.nodes() == M->nodes());
  CHECK(back.w_nodes() == M->w_nodes());
  CHECK(back.w(7.3) == M->w(7.3));
  CHECK(back.profile().describe() == P.describe());
  const auto G = build_green(M, 2.0);
  const auto G2 = green_from_json(M, json::parse(green_to_json(G).dump()));
  CHECK(G2.z(5.0) == G.z(5.0));
  CHECK(G2.r_K() == G.r_K());
  auto bad = j;
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(model_from_json(bad), ConfigurationError);
}

TEST_CASE("svg rendering is deterministic and escaped") {
  svg::LineChart c;
  c.title = "a < b & c";
  c.log_y = true;
  c.series.push_back({"s", {1, 2, 3}, {1, 10, 0}, true});
  c.hlines.push_back({"bound", 4.0});
  const auto a = svg::render(c);
  CHECK(a == svg::render(c));
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(svg::escape("\"x>") == "&quot;x&gt;");
}

TEST_CASE("table csv formatting") {
  Table t;
  t.columns = {"x", "label", "v"};
  t.add({1.5, std::string("a,b"), std::monostate{}});
  t.add({0.1, std::string("c"), 1e-300});
  CHECK(t.to_csv() == "x,label,v\n1.5,\"a,b\",\n0.10000000000000001,c,1e-300\n");
  CHECK_THROWS(t.add({1.0}));
}

TEST_CASE("model command on flat space") {
  RunConfig c;
  c.command = "model";
  c.profile = "flat";
  c.tmax = 10.0;
  const auto r = run(c);
  REQUIRE(r.commands.size() == 1);
  CHECK(r.exit_status() == 0);
  CHECK(r.model->w(1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hardy command holds on the hyperbolic corpus") {
  RunConfig c;
  c.command = "hardy";
  c.alpha = 0.0;
  c.p = {2.0};
  const auto r = run(c);
  CHECK(r.exit_status() == 0);
  const auto rep = report_json(r);
  for (const auto& s : rep["commands"][0]["sections"]) CHECK(s["status"] == "holds");
  const auto& t = r.commands[0].table;
  const auto ratio_col = std::find(t.columns.begin(), t.columns.end(), "ratio") - t.columns.begin();
  for (const auto& row : t.rows) CHECK(std::get<double>(row[ratio_col]) <= 4.0 * (1.0 + 1e-6));
}

TEST_CASE("stochastic command classifies alpha = 3 as incomplete") {
  RunConfig c;
  c.command = "stochastic";
  c.alpha = 3.0;
  const auto r = run(c);
  CHECK(r.exit_status() == 0);
  CHECK(report_json(r)["commands"][0]["sections"][0]["verdict"] == "incomplete");
}

TEST_CASE("commands that do not apply are configuration errors") {
  RunConfig c;
  c.command = "liyau";
  c.profile = "flat";
  CHECK_THROWS_AS(run(c), ConfigurationError);
}

TEST_CASE("bundle is written and reproducible") {
  RunConfig c;
  c.command = "cutoffs";
  c.plot = true;
  const auto d1 = scratch("bundle1"), d2 = scratch("bundle2");
  c.out = d1.string();
  std::ostringstream log;
  CHECK(execute(c, log) == 0);
  c.out = d2.string();
  CHECK(execute(c, log) == 0);
  for (const char* f : {"manifest.json", "model.json", "report.json", "records.csv"}) CHECK(fs::exists(d1 / f));
  CHECK(slurp(d1 / "records.csv") == slurp(d2 / "records.csv"));
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(!fs::is_empty(d1 / "plots"));
  const auto manifest = json::parse(slurp(d1 / "manifest.json"));
  CHECK(manifest["config_hash"] == hex64(config_hash(c)));
  CHECK(manifest["config"]["out"] == d1.string());
}

TEST_CASE("tidy records for all") {
  RunResult r;
  r.config.command = "all";
  CommandResult a;
  a.command = "x";
  a.table.columns = {"k", "v"};
  a.table.add({1.0, 2.0});
  r.commands.push_back(a);
  CHECK(records_csv(r) == "command,label,field,value\nx,k=1,v,2\n");
}
