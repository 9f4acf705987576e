#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "warplab/geometry.hpp"
#include "warplab/quadrature.hpp"

namespace warplab {

class GreenFunction;

/// f, f', f'' at a point, all multiplied by e^{log_scale}.
struct Jet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
  double log_scale = 0.0;
};

/// A radial function given by an evaluator of its 2-jet on [lo, hi].
/// Compact functions vanish (with their derivatives) outside [lo, hi];
/// non-compact ones throw RangeError there.
class RadialFunction {
 public:
  using Evaluator = std::function<Jet(double)>;

  RadialFunction() = default;  // identically zero
  RadialFunction(std::string label, double lo, double hi, Evaluator eval, std::vector<double> kinks = {},
                 bool compact = true);

  const std::string& label() const noexcept { return label_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool compact() const noexcept { return compact_; }
  bool is_zero() const noexcept { return !eval_; }
  /// Points where f'' may be only continuous (quadrature breakpoints).
  const std::vector<double>& kinks() const noexcept { return kinks_; }

  Jet jet(double t) const;
  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

  RadialFunction relabeled(std::string label) const;

 private:
  std::string label_ = "zero";
  double lo_ = 0.0;
  double hi_ = 0.0;
  Evaluator eval_;
  std::vector<double> kinks_;
  bool compact_ = true;
};

RadialFunction zero_function(std::string label = "zero");

/// Pointwise product; support is the intersection.
RadialFunction product(const RadialFunction& a, const RadialFunction& b, std::string label = "");

/// amp * S((t-a)/d1) * S((b-t)/d2) on [a, b].
RadialFunction plateau_bump(std::string label, double a, double b, double d1, double d2, double amp = 1.0);

/// plateau envelope times cos(2 pi m (t-a)/(b-a) + phase).
RadialFunction oscillating_bump(std::string label, double a, double b, double d1, double d2, double amp, double m,
                                double phase);

/// G^{(p-1)/p} phi(-log G) with phi a plateau in s = -log G on [s_lo, s_hi],
/// ramps of width ramp in s.
RadialFunction extremal_member(std::string label, const GreenFunction& G, double s_lo, double s_hi, double ramp);

enum class Deriv { value, gradient, hessian, laplacian };

const char* deriv_name(Deriv d);

/// |D f| in the mantissa scale of the jet: |f|, |f'|,
/// sqrt(f''^2 + (n-1)(w f')^2), |f'' + (n-1) w f'|.
double jet_magnitude(const Jet& j, Deriv d, int n, double w);

/// Radial p-Laplacian |f'|^{p-2}(f'(n-1)w + (p-1)f'') of a jet; nullopt at a
/// critical point when p < 2.
std::optional<double> radial_p_laplacian(int n, double w, double p, double df, double d2f);

/// Delta_p f(t) in true scale; RangeError outside the grid.
std::optional<double> p_laplacian(const ModelManifold& M, const RadialFunction& f, double p, double t);

using VolumeIntegrand = std::function<void(double t, double& L, double* g)>;

/// Integrates e^{L(t)} g_k(t) dV over [a, b], dV = |S^{n-1}| j^{n-1} dt.
quad::Result integrate_volume(const ModelManifold& M, double a, double b, const std::vector<double>& kinks,
                              std::size_t K, const VolumeIntegrand& fn, const quad::Options& opt = {});

/// Same integrand on a fixed mesh with fixed log references.
quad::Result integrate_volume_on_mesh(const ModelManifold& M, const std::vector<double>& edges, std::size_t K,
                                      const VolumeIntegrand& fn, const std::vector<double>& log_refs);

/// int |D f|^p dV for the four derivative kinds on one shared mesh.
std::array<quad::ScaledValue, 4> lp_integrals(const ModelManifold& M, const RadialFunction& f, double p,
                                              const quad::Options& opt = {}, quad::Result* detail = nullptr);

/// (int |D f|^p dV)^{1/p}; RangeError if the support leaves the grid.
double lp_norm(const ModelManifold& M, const RadialFunction& f, double p, Deriv d, const quad::Options& opt = {});

/// Relative change of every L^p norm of f when the converged mesh is halved.
double lp_refinement_change(const ModelManifold& M, const RadialFunction& f, double p,
                            const quad::Options& opt = {});

/// Seeded description of a test corpus.
struct TestCorpus {
  std::uint64_t seed = 42;
  std::size_t size = 0;
  bool plateau = true;
  bool oscillatory = true;
  bool extremal = true;  ///< needs a Green function
  int max_oscillations = 12;
  std::size_t extremal_members = 4;
};

/// Deterministic corpus supported in [inner_radius, 0.9 t_max].
std::vector<RadialFunction> generate_corpus(const TestCorpus& spec, const ModelManifold& M, double inner_radius,
                                            const GreenFunction* G = nullptr);

}  // namespace warplab
