#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "warplab/green.hpp"
#include "warplab/radial.hpp"

namespace warplab {

enum class Verdict { holds, violated, report_only };

const char* verdict_name(Verdict v);

/// One tested function. lhs and rhs are mantissas of lhs * e^{log_scale}.
struct Record {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double log_scale = 0.0;
  std::vector<std::pair<std::string, double>> extra;
};

struct InequalityReport {
  std::string name;
  double p = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  std::vector<Record> records;
  std::optional<double> sharp_constant;
  double empirical_constant = 0.0;
  Verdict verdict = Verdict::report_only;
  double quadrature_tol = 0.0;
  std::string offending;  ///< first record breaking an asserted claim
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::string> notes;

  double diagnostic(const std::string& key) const;
};

struct VerifyOptions {
  quad::Options quad;
};

/// Sets empirical_constant and, with a sharp constant, the verdict.
void finalize(InequalityReport& r);

/// |a - b| / max(a, b): change of an empirical constant under corpus doubling.
double enrichment_change(double a, double b);

/// Hardy inequality with the p-Green weight:
///   int (1/z)^p s^{beta p} |f|^p dV <= (p/(p-1))^p int s^{beta p} |f'|^p dV,
/// s = -log G. PreconditionError (naming the label) if a member leaves
/// [r_K, 0.9 t_max].
InequalityReport verify_hardy(const GreenFunction& G, double beta, const std::vector<RadialFunction>& corpus,
                              const VerifyOptions& opt = {});

/// Second-order version against int |Hess f|^p dV (report-only), with the
/// middle quantities of the Kato chain in each record's extras and the
/// fitted constant C_log = sup (s^beta z)^p in the diagnostics.
InequalityReport verify_hardy2(const GreenFunction& G, double beta, const std::vector<RadialFunction>& corpus,
                               const VerifyOptions& opt = {});

struct EmbeddingOptions {
  double p = 2.0;
  double alpha = 0.0;          ///< weight exponent
  double inner_radius = 1.0;   ///< weight switched on beyond it
  double ramp = 1.0;           ///< width of the switch-on
  std::vector<double> sweep_R; ///< radii for the tail sweep
  bool first_order = false;    ///< alpha/2 weight against W^{1,p}
  VerifyOptions verify;
};

/// ||omega f||_p / ||f||_{W^{2,p}} per member (report-only) and the sweep
/// ||omega_R f||_p, omega_R = t^alpha (1 - chi_R), asserted strictly
/// decreasing to below 1e-3 of its first value. ConfigurationError if alpha
/// exceeds the growth the model supports.
InequalityReport verify_weight_embedding(const ModelManifold& M, const std::vector<RadialFunction>& corpus,
                                         const RadialFunction& sweep_function, const EmbeddingOptions& opt);

/// Largest weight exponent the model supports: the profile's alpha, or twice
/// the fitted growth exponent of w over the last decade (+0.05).
double supported_weight_exponent(const ModelManifold& M);

struct CZOptions {
  std::vector<double> epsilons;          ///< weighted variant, empty to skip
  std::vector<double> A2_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  double A2 = 1.0;                       ///< declared constant for the headline fit
  double weight_beta = 0.0;              ///< r^beta in the weighted term
  VerifyOptions verify;
};

/// ||Hess phi||_2 / (||Delta phi||_2 + ||phi||_2) (report-only) with the
/// Bochner residual per member; weighted fits in the diagnostics.
InequalityReport verify_cz2(const ModelManifold& M, const std::vector<RadialFunction>& corpus,
                            const CZOptions& opt = {});

/// Slowly decaying test function j^{-(n-1)/p} t^{-m} switched on over
/// [t_on, t_on + 1] and truncated smoothly before 0.9 t_max.
RadialFunction tail_surrogate(const ModelManifold& M, double p, double m, double t_on = 0.5);

/// Remainder norms of chi_R f - f for Hessian cutoffs at each R; asserts
/// every column strictly decreasing and finally below 1e-3 of its start.
InequalityReport density_probe(const ModelManifold& M, const RadialFunction& f, double p,
                               const std::vector<double>& R_list, const VerifyOptions& opt = {});

}  // namespace warplab
