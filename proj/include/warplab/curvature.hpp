#pragma once

#include <string>
#include <variant>
#include <vector>

namespace warplab {

/// kappa(t) = A^2 t^alpha.
struct PowerLaw {
  double A = 1.0;
  double alpha = 0.0;
};

/// kappa(t) = lambda(t)^2 with lambda(t) = a t prod_{j=1}^{k} log^[j](t) for
/// t >= t_onset, blended (C^2, quintic) to a constant on [0, t_onset / 2].
struct IteratedLog {
  double a = 1.0;
  int k = 0;
  double t_onset = 1.0;
};

struct Flat {};

/// Piecewise-linear kappa on a strictly increasing grid.
struct Tabulated {
  std::vector<double> t;
  std::vector<double> kappa;
};

/// Radial curvature law kappa(t) >= 0 of the Jacobi equation j'' = kappa j.
class CurvatureProfile {
 public:
  using Kind = std::variant<Flat, PowerLaw, IteratedLog, Tabulated>;

  CurvatureProfile() = default;
  explicit CurvatureProfile(Kind kind);

  static CurvatureProfile flat() { return CurvatureProfile(Flat{}); }
  static CurvatureProfile power_law(double A, double alpha) { return CurvatureProfile(PowerLaw{A, alpha}); }
  static CurvatureProfile iterated_log(double a, int k, double t_onset) {
    return CurvatureProfile(IteratedLog{a, k, t_onset});
  }
  static CurvatureProfile tabulated(std::vector<double> t, std::vector<double> kappa) {
    return CurvatureProfile(Tabulated{std::move(t), std::move(kappa)});
  }

  const Kind& kind() const noexcept { return kind_; }
  bool is_flat() const noexcept { return std::holds_alternative<Flat>(kind_); }

  /// Coefficient of the Jacobi equation; throws RangeError for a tabulated
  /// profile queried outside its grid.
  double kappa(double t) const;

  std::string describe() const;

 private:
  Kind kind_ = Flat{};
};

inline double kappa(const CurvatureProfile& profile, double t) { return profile.kappa(t); }

/// j-th iterated logarithm, log^[0](t) = t.
double iterated_log(int j, double t);

/// Smallest t at which log^[1..k](t) are all >= 1 (0 for k = 0).
double iterated_log_onset(int k);

/// lambda(t) = a t prod_{j=1}^{k} log^[j](t); DomainError below the onset.
double lambda_profile(double a, int k, double t);

/// Growth scale lambda used by the Laplacian cutoffs and the Li-Yau probe.
/// Either the iterated-log law or lambda = A t^{alpha/2} = sqrt(kappa) of a
/// power law.
class LambdaScale {
 public:
  static LambdaScale iterated_log(double a, int k);
  static LambdaScale power(double A, double alpha);
  /// The scale sqrt(kappa) implied by a profile far out; ConfigurationError for
  /// flat or tabulated profiles.
  static LambdaScale from_profile(const CurvatureProfile& profile);

  double value(double t) const;
  double derivative(double t) const;
  /// int_{t0}^{t1} ds / lambda(s), closed form.
  double reciprocal_integral(double t0, double t1) const;
  std::string describe() const;

 private:
  bool power_ = false;
  double coef_ = 1.0;
  double exponent_ = 0.0;  // alpha for the power law
  int k_ = 0;
};

}  // namespace warplab
