#include "warplab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "warplab/errors.hpp"
#include "warplab/smoothstep.hpp"

namespace warplab {

namespace {

void validate(const Flat&) {}

void validate(const PowerLaw& p) {
  if (!(p.A > 0.0)) throw ConfigurationError("power law: A must be positive");
  if (!(p.alpha >= 0.0)) throw ConfigurationError("power law: alpha must be non-negative");
}

void validate(const IteratedLog& p) {
  if (!(p.a > 0.0)) throw ConfigurationError("iterated log: a must be positive");
  if (p.k < 0) throw ConfigurationError("iterated log: k must be non-negative");
  if (p.k > 3) throw ConfigurationError("iterated log: k > 3 has an onset beyond any representable grid");
  const double lo = iterated_log_onset(p.k);
  if (!(p.t_onset > 0.0) || p.t_onset < 2.0 * lo)
    throw ConfigurationError("iterated log: t_onset must be positive and at least twice the iterated-log onset");
}

void validate(const Tabulated& p) {
  if (p.t.size() < 2 || p.t.size() != p.kappa.size())
    throw ConfigurationError("tabulated profile: need matching t/kappa arrays of length >= 2");
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    if (i > 0 && !(p.t[i] > p.t[i - 1])) throw ConfigurationError("tabulated profile: grid must be strictly increasing");
    if (!(p.kappa[i] >= 0.0)) throw ConfigurationError("tabulated profile: kappa must be non-negative");
  }
}

}  // namespace

CurvatureProfile::CurvatureProfile(Kind kind) : kind_(std::move(kind)) {
  std::visit([](const auto& k) { validate(k); }, kind_);
}

double CurvatureProfile::kappa(double t) const {
  if (!(t >= 0.0)) throw DomainError("kappa: t must be non-negative");
  struct Visitor {
    double t;
    double operator()(const Flat&) const { return 0.0; }
    double operator()(const PowerLaw& p) const { return p.A * p.A * std::pow(t, p.alpha); }
    double operator()(const IteratedLog& p) const {
      const double half = 0.5 * p.t_onset;
      const double lam = [&](double s) { return lambda_profile(p.a, p.k, s); }(std::max(t, half));
      if (t >= p.t_onset) return lam * lam;
      const double base = lambda_profile(p.a, p.k, half);
      if (t <= half) return base * base;
      const double s = smoothstep((t - half) / half);
      return (1.0 - s) * base * base + s * lam * lam;
    }
    double operator()(const Tabulated& p) const {
      if (t < p.t.front() || t > p.t.back()) throw RangeError("kappa: tabulated profile queried outside its grid");
      auto it = std::upper_bound(p.t.begin(), p.t.end(), t);
      if (it == p.t.end()) return p.kappa.back();
      const auto i = static_cast<std::size_t>(it - p.t.begin());
      const double u = (t - p.t[i - 1]) / (p.t[i] - p.t[i - 1]);
      return (1.0 - u) * p.kappa[i - 1] + u * p.kappa[i];
    }
  };
  return std::visit(Visitor{t}, kind_);
}

std::string CurvatureProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  struct Visitor {
    std::ostringstream& os;
    void operator()(const Flat&) const { os << "flat"; }
    void operator()(const PowerLaw& p) const { os << "power_law(A=" << p.A << ",alpha=" << p.alpha << ")"; }
    void operator()(const IteratedLog& p) const {
      os << "iterated_log(a=" << p.a << ",k=" << p.k << ",t_onset=" << p.t_onset << ")";
    }
    void operator()(const Tabulated& p) const { os << "tabulated(" << p.t.size() << " nodes)"; }
  };
  std::visit(Visitor{os}, kind_);
  return os.str();
}

double iterated_log(int j, double t) {
  double v = t;
  for (int i = 0; i < j; ++i) {
    if (!(v > 0.0)) throw DomainError("iterated_log: argument left the domain of log");
    v = std::log(v);
  }
  return v;
}

double iterated_log_onset(int k) {
  if (k <= 0) return 0.0;
  double t = 1.0;
  for (int i = 0; i < k; ++i) t = std::exp(t);
  return t;
}

double lambda_profile(double a, int k, double t) {
  if (k < 0) throw DomainError("lambda_profile: k must be non-negative");
  if (k == 0 ? !(t > 0.0) : t < iterated_log_onset(k))
    throw DomainError("lambda_profile: t below the iterated-log onset");
  double prod = a * t;
  double v = t;
  for (int j = 1; j <= k; ++j) {
    v = std::log(v);
    prod *= v;
  }
  return prod;
}

LambdaScale LambdaScale::iterated_log(double a, int k) {
  if (!(a > 0.0) || k < 0) throw ConfigurationError("lambda scale: need a > 0 and k >= 0");
  LambdaScale s;
  s.coef_ = a;
  s.k_ = k;
  return s;
}

LambdaScale LambdaScale::power(double A, double alpha) {
  if (!(A > 0.0) || !(alpha > 0.0))
    throw ConfigurationError("lambda scale: power law needs A > 0 and alpha > 0");
  LambdaScale s;
  s.power_ = true;
  s.coef_ = A;
  s.exponent_ = alpha;
  return s;
}

LambdaScale LambdaScale::from_profile(const CurvatureProfile& profile) {
  if (const auto* p = std::get_if<PowerLaw>(&profile.kind())) return power(p->A, p->alpha);
  if (const auto* p = std::get_if<IteratedLog>(&profile.kind())) return iterated_log(p->a, p->k);
  throw ConfigurationError("lambda scale: profile has no growth scale (use a power law or an iterated-log law)");
}

double LambdaScale::value(double t) const {
  if (power_) return coef_ * std::pow(t, 0.5 * exponent_);
  return lambda_profile(coef_, k_, t);
}

double LambdaScale::derivative(double t) const {
  if (power_) return coef_ * 0.5 * exponent_ * std::pow(t, 0.5 * exponent_ - 1.0);
  // lambda' = a P (1 + sum_j 1 / (L_1 ... L_j)),  P = prod L_j
  (void)lambda_profile(coef_, k_, t);
  double prod = 1.0;
  double partial = 1.0;
  double sum = 1.0;
  double v = t;
  for (int j = 1; j <= k_; ++j) {
    v = std::log(v);
    prod *= v;
    partial *= v;
    sum += 1.0 / partial;
  }
  return coef_ * prod * sum;
}

double LambdaScale::reciprocal_integral(double t0, double t1) const {
  if (power_) {
    const double e = 1.0 - 0.5 * exponent_;
    if (std::abs(e) < 1e-14) return std::log(t1 / t0) / coef_;
    return (std::pow(t1, e) - std::pow(t0, e)) / (coef_ * e);
  }
  (void)lambda_profile(coef_, k_, t0);
  (void)lambda_profile(coef_, k_, t1);
  // d/dt log^[k+1](t) = 1 / (t prod_{j=1}^{k} log^[j](t))
  return (warplab::iterated_log(k_ + 1, t1) - warplab::iterated_log(k_ + 1, t0)) / coef_;
}

std::string LambdaScale::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (power_)
    os << "power(A=" << coef_ << ",alpha=" << exponent_ << ")";
  else
    os << "iterated_log(a=" << coef_ << ",k=" << k_ << ")";
  return os.str();
}

}  // namespace warplab
