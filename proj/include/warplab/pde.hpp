#pragma once

#include <memory>
#include <string>
#include <vector>

#include "warplab/curvature.hpp"
#include "warplab/geometry.hpp"
#include "warplab/ode.hpp"
#include "warplab/radial.hpp"

namespace warplab {

struct ExhaustionOptions {
  double h_base = 2e-3;      ///< largest spacing
  double h_pole = 1e-4;      ///< smallest spacing (at the pole)
  double w_factor = 0.05;    ///< spacing <= w_factor / ((n-1) w)
  int refine = 1;            ///< subdivide every mesh interval this many times
  bool waive_support = false;  ///< allow psi not supported inside the smallest ball
  bool check_refinement = false;  ///< also solve on the 2x mesh and report the change
};

/// Finite-volume solutions of (-Delta + 1) v = psi on nested balls B_{R_k},
/// v(R_k) = 0, on one graded mesh whose prefixes serve the smaller balls.
struct ExhaustionSolution {
  std::vector<double> radii;
  std::vector<double> mesh;              ///< nodes on [0, R_max]
  std::vector<std::size_t> end_index;    ///< mesh[end_index[k]] == radii[k]
  std::vector<double> log_volume;        ///< log of the control-volume measure per node
  std::vector<double> psi;               ///< psi at the nodes
  std::vector<std::vector<double>> v;    ///< v_k on mesh[0..end_index[k]]
  std::vector<double> p_list;
  std::vector<std::vector<double>> norm_p;  ///< [k][i] discrete L^p norm of v_k
  std::vector<double> norm_inf;
  std::vector<double> psi_norm_p;
  double psi_norm_inf = 0.0;
  double monotonicity_violation = 0.0;   ///< max_k max (v_k - v_{k+1})^+ / ||v||_inf
  double limit_change = 0.0;             ///< sup |v_K - v_{K-1}| / ||v||_inf on the common ball
  bool converged = false;
  double refinement_change = 0.0;        ///< with check_refinement
  bool m_matrix = true;

  /// v_k(t), cubic interpolation through neighbouring nodes (0 beyond R_k).
  double value(std::size_t k, double t) const;
  /// Central-difference v_k' at node i (0 at the pole and at the boundary node).
  double node_derivative(std::size_t k, std::size_t i) const;
};

ExhaustionSolution solve_dirichlet_exhaustion(const ModelManifold& M, const RadialFunction& psi,
                                              std::vector<double> radii, std::vector<double> p_list,
                                              const ExhaustionOptions& opt = {});

/// Empirical constant of ||v'||_q <= C (||v||_q + ||Delta v||_q) for level k.
struct GradientProbe {
  double q;
  double gradient_norm;
  double rhs;
  double ratio;
};
std::vector<GradientProbe> gradient_estimate_probe(const ExhaustionSolution& sol, std::size_t k,
                                                   const std::vector<double>& q_list);

/// Decaying positive solution of Delta v = v outside B_{r0}, via s = v'/v,
/// normalized by v(r0) = 1.
class ExteriorEigenfunction {
 public:
  struct Data {
    std::shared_ptr<const ModelManifold> M;
    double r0 = 0.0;
    double log_v0 = 0.0;
    ode::Trajectory<2> traj;  // (s, log v) on [r0, t_max]
  };

  explicit ExteriorEigenfunction(std::shared_ptr<const Data> data);

  double r0() const noexcept { return d_->r0; }
  double t_end() const noexcept { return d_->traj.t.back(); }
  double s(double t) const;
  double s_prime(double t) const;
  double log_v(double t) const;
  /// |v'' + (n-1) w v' - v| / v with v''/v = s' + s^2 taken from the interpolant.
  double residual(double t) const;
  /// Non-compact radial function on [r0, t_max].
  const RadialFunction& function() const noexcept { return fn_; }

 private:
  std::shared_ptr<const Data> d_;
  RadialFunction fn_;
};

ExteriorEigenfunction exterior_eigenfunction(std::shared_ptr<const ModelManifold> M, double r0);
ExteriorEigenfunction exterior_eigenfunction(const ModelManifold& M, double r0);

/// sup over [R, gamma R] of |v'| / (lambda(R) v).
double li_yau_ratio(const ExteriorEigenfunction& v, const LambdaScale& lambda, double R, double gamma);

enum class Completeness { complete, incomplete, inconclusive };
const char* completeness_name(Completeness c);

struct StochasticDiagnostics {
  Completeness verdict = Completeness::inconclusive;
  double T = 0.0;
  double u_T = 0.0;                      ///< int_0^T y
  std::vector<double> increments;        ///< int over [T/8,T/4], [T/4,T/2], [T/2,T]
  std::vector<double> increment_ratios;  ///< consecutive quotients
  double identity_residual = 0.0;        ///< max |y' + (n-1) w y - 1|
};

/// Tail test on u(t) = int_0^t y (Delta u = 1 on the model).
StochasticDiagnostics classify_stochastic_completeness(const ModelManifold& M);

struct PairingRow {
  double R = 0.0;
  double term_laplacian_v = 0.0;   ///< -int u chi Delta v
  double term_laplacian_chi = 0.0; ///< -int u v Delta chi
  double term_gradient = 0.0;      ///< -2 int u <grad chi, grad v>
  double term_zero_order = 0.0;    ///< int u chi v
  double total = 0.0;
};

struct PositivityReport {
  double u_min = 0.0;
  double u_max = 0.0;
  double u_norm_p = 0.0;
  bool positive = true;               ///< min u >= -1e-8 ||u||_inf
  double pairing_reference = 0.0;     ///< int u psi
  std::vector<PairingRow> rows;
  bool pairing_decays = true;         ///< cutoff terms shrink below 1e-3 of the reference
  double final_cutoff_fraction = 0.0;
};

/// Solves (-Delta + 1) u = mu on B_{R_ex} and probes the pairing of u with
/// chi_R v, v the solution for psi, over the R sweep.
PositivityReport positivity_probe(const ModelManifold& M, const RadialFunction& mu, const RadialFunction& psi,
                                  double p, const std::vector<double>& R_list, double R_ex,
                                  const ExhaustionOptions& opt = {});

}  // namespace warplab
