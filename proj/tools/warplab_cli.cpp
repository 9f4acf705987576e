// warplab: batch front-end for the model-manifold laboratory.
//
//   warplab <command> [flags]        command: model green hardy hardy2 embed cz2
//                                    cutoffs density ppp liyau stochastic all
//
// Precedence: flags > --config file > built-in defaults.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "warplab/config.hpp"
#include "warplab/errors.hpp"
#include "warplab/run.hpp"

int main(int argc, char** argv) {
  using nlohmann::json;
  CLI::App app{"warplab: model-manifold inequality laboratory"};
  app.set_version_flag("--version", std::string(WARPLAB_VERSION));

  std::string command, config_path, profile, method, out;
  int n = 0, k = 0;
  double alpha = 0, A = 0, a = 0, t_onset = 0, tmax = 0, tol = 0, tail_m = 0, quad_tol = 0;
  std::vector<double> p, beta, eps, R;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  bool plot = false, print_config = false;

  app.add_option("command", command, "command to run")
      ->required()
      ->check(CLI::IsMember(warplab::command_names()));
  app.add_option("--config", config_path, "JSON config file (schema_version 1)");
  auto* o_n = app.add_option("--n", n, "dimension");
  auto* o_profile =
      app.add_option("--profile", profile, "curvature profile")
          ->check(CLI::IsMember({"power", "flat", "iterated-log", "tabulated"}));
  auto* o_A = app.add_option("--A", A, "power-law amplitude");
  auto* o_alpha = app.add_option("--alpha", alpha, "power-law exponent");
  auto* o_a = app.add_option("--a", a, "iterated-log scale");
  auto* o_k = app.add_option("--k", k, "iterated-log depth");
  auto* o_onset = app.add_option("--t_onset", t_onset, "iterated-log blend onset");
  auto* o_tmax = app.add_option("--tmax", tmax, "grid end");
  auto* o_tol = app.add_option("--tol", tol, "ODE tolerance");
  auto* o_method = app.add_option("--method", method, "ODE method")->check(CLI::IsMember({"radau5", "dopri5"}));
  auto* o_p = app.add_option("--p", p, "exponents p (list)")->delimiter(',');
  auto* o_beta = app.add_option("--beta", beta, "weight exponents beta (list)")->delimiter(',');
  auto* o_eps = app.add_option("--eps", eps, "epsilon list for the weighted CZ(2) fit")->delimiter(',');
  auto* o_seed = app.add_option("--seed", seed, "corpus seed");
  auto* o_count = app.add_option("--count", count, "corpus size");
  auto* o_R = app.add_option("--R", R, "R sweep (list)")->delimiter(',');
  auto* o_tail = app.add_option("--tail_m", tail_m, "tail decay exponent of the surrogate");
  auto* o_qtol = app.add_option("--quad_tol", quad_tol, "quadrature tolerance");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_plot = app.add_flag("--plot", plot, "write plots/*.svg");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    warplab::RunConfig cfg;
    if (!config_path.empty()) cfg = warplab::load_config(config_path);
    json flags;
    flags["command"] = command;
    if (*o_n) flags["n"] = n;
    if (*o_profile) flags["profile"] = profile;
    if (*o_A) flags["A"] = A;
    if (*o_alpha) flags["alpha"] = alpha;
    if (*o_a) flags["a"] = a;
    if (*o_k) flags["k"] = k;
    if (*o_onset) flags["t_onset"] = t_onset;
    if (*o_tmax) flags["tmax"] = tmax;
    if (*o_tol) flags["tol"] = tol;
    if (*o_method) flags["method"] = method;
    if (*o_p) flags["p"] = p;
    if (*o_beta) flags["beta"] = beta;
    if (*o_eps) flags["eps"] = eps;
    if (*o_seed) flags["seed"] = seed;
    if (*o_count) flags["count"] = count;
    if (*o_R) flags["R"] = R;
    if (*o_tail) flags["tail_m"] = tail_m;
    if (*o_qtol) flags["quad_tol"] = quad_tol;
    if (*o_out) flags["out"] = out;
    if (*o_plot) flags["plot"] = plot;
    warplab::merge_config(cfg, flags);
    warplab::validate(cfg);
    if (print_config) {
      std::cout << warplab::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    return warplab::execute(cfg, std::cout);
  } catch (const warplab::ConfigurationError& e) {
    std::cerr << "warplab: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "warplab: " << e.what() << '\n';
    return 3;
  }
}
