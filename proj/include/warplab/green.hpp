#pragma once

#include <memory>
#include <vector>

#include "warplab/geometry.hpp"

namespace warplab {

/// Radial p-Green function G_p(t) = int_t^inf j^{-(n-1)/(p-1)}, carried as the
/// Green ratio z = G/|G'| and log G = log z - c log j, c = (n-1)/(p-1).
class GreenFunction {
 public:
  GreenFunction(std::shared_ptr<const ModelManifold> M, double p, double seed_t, std::vector<double> t,
                std::vector<double> z);

  const ModelManifold& model() const noexcept { return *M_; }
  std::shared_ptr<const ModelManifold> model_ptr() const noexcept { return M_; }
  double p() const noexcept { return p_; }
  double c() const noexcept { return c_; }
  /// Abscissa the backward solve started from.
  double seed_t() const noexcept { return seed_t_; }
  /// Smallest t with G(t) <= e^{-1}; +inf when the grid never reaches it.
  double r_K() const noexcept { return r_K_; }

  const std::vector<double>& nodes() const noexcept { return t_; }
  const std::vector<double>& z_nodes() const noexcept { return z_; }
  const std::vector<double>& logG_nodes() const noexcept { return logG_; }

  /// Queries on [t_min, seed_t]; RangeError outside.
  double z(double t) const;
  double z_prime(double t) const;
  double logG(double t) const;
  /// -log G
  double s(double t) const { return -logG(t); }

 private:
  void check(double t) const;

  std::shared_ptr<const ModelManifold> M_;
  double p_, c_, seed_t_;
  std::vector<double> t_, z_, dz_, logG_;
  double r_K_;
};

/// Backward solve of z' = -1 + c w z from seed_t (defaults to t_max).
GreenFunction build_green(std::shared_ptr<const ModelManifold> M, double p, double seed_t = 0.0);
GreenFunction build_green(const ModelManifold& M, double p, double seed_t = 0.0);

/// p-th root of the Hardy weight: (1/z) (-log G)^beta; DomainError below r_K.
double hardy_weight(const GreenFunction& G, double beta, double t);

/// Max over interior interval midpoints of |Delta_p G| relative to the size
/// of its two terms, using the radial p-Laplacian.
double superharmonicity_residual(const GreenFunction& G);

}  // namespace warplab
