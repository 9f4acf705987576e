#pragma once

// Adaptive integrators for small autonomous-in-structure systems x' = f(t, x).
//
// radau5: 3-stage Radau IIA (order 5, L-stable), full Newton with the analytic
// Jacobian, error by step doubling. dopri5: Dormand-Prince 5(4) with its
// embedded estimate. Both emit the nodes t, t + h/2, t + h of every accepted
// step together with f at those nodes, so the trajectory carries a C^1 cubic
// Hermite interpolant whose midpoint error is also controlled.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "warplab/errors.hpp"
#include "warplab/interp.hpp"

namespace warplab::ode {

enum class Method { radau5, dopri5 };

inline const char* method_name(Method m) { return m == Method::radau5 ? "radau5" : "dopri5"; }

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
struct Control {
  double tol = 1e-10;
  // component i is measured against tol * max(floor[i], |x_i|)
  State<N> floor{};
  double h_init = 1e-3;
  double h_max = std::numeric_limits<double>::infinity();
  double interp_factor = 10.0;
  bool interp_control = true;
  long max_steps = 5'000'000;
  // abscissae the integrator must land on (kinks of the coefficients)
  std::vector<double> breakpoints;
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<State<N>> x;
  std::vector<State<N>> dx;
  long accepted = 0;
  long rejected = 0;

  // Puts the abscissae in increasing order (after a backward solve).
  void make_increasing() {
    if (t.size() > 1 && t.front() > t.back()) {
      std::reverse(t.begin(), t.end());
      std::reverse(x.begin(), x.end());
      std::reverse(dx.begin(), dx.end());
    }
  }

  double value(std::size_t comp, double s) const {
    const std::size_t i = interp::locate(t, s);
    return interp::hermite_value(t[i], t[i + 1], x[i][comp], x[i + 1][comp], dx[i][comp], dx[i + 1][comp], s);
  }
  double derivative(std::size_t comp, double s) const {
    const std::size_t i = interp::locate(t, s);
    return interp::hermite_derivative(t[i], t[i + 1], x[i][comp], x[i + 1][comp], dx[i][comp], dx[i + 1][comp], s);
  }
};

namespace detail {

// Gaussian elimination with partial pivoting; false if singular.
template <std::size_t M>
bool solve_dense(std::array<std::array<double, M>, M>& a, std::array<double, M>& b) {
  for (std::size_t col = 0; col < M; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < M; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > 0.0)) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < M; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < M; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t r = M; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < M; ++c) s -= a[r][c] * b[c];
    b[r] = s / a[r][r];
  }
  return true;
}

template <std::size_t N>
bool finite(const State<N>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

template <std::size_t N>
double scaled_norm(const State<N>& e, const State<N>& ref_a, const State<N>& ref_b, const Control<N>& ctl) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = ctl.tol * std::max({ctl.floor[i], std::abs(ref_a[i]), std::abs(ref_b[i])});
    worst = std::max(worst, std::abs(e[i]) / sc);
  }
  return worst;
}

struct RadauTableau {
  double c[3];
  double a[3][3];
  RadauTableau() {
    const double s6 = std::sqrt(6.0);
    c[0] = (4.0 - s6) / 10.0;
    c[1] = (4.0 + s6) / 10.0;
    c[2] = 1.0;
    a[0][0] = (88.0 - 7.0 * s6) / 360.0;
    a[0][1] = (296.0 - 169.0 * s6) / 1800.0;
    a[0][2] = (-2.0 + 3.0 * s6) / 225.0;
    a[1][0] = (296.0 + 169.0 * s6) / 1800.0;
    a[1][1] = (88.0 + 7.0 * s6) / 360.0;
    a[1][2] = (-2.0 - 3.0 * s6) / 225.0;
    a[2][0] = (16.0 - s6) / 36.0;
    a[2][1] = (16.0 + s6) / 36.0;
    a[2][2] = 1.0 / 9.0;
  }
};

inline const RadauTableau& radau() {
  static const RadauTableau tab;
  return tab;
}

// One Radau IIA step; false when Newton does not converge.
template <std::size_t N, class System>
bool radau_step(const System& sys, double t, const State<N>& x, double h, const Control<N>& ctl, State<N>& out) {
  constexpr std::size_t M = 3 * N;
  const RadauTableau& tab = radau();
  std::array<double, M> z{};
  std::array<State<N>, 3> f;
  std::array<Matrix<N>, 3> jac;
  for (int iter = 0; iter < 12; ++iter) {
    for (std::size_t j = 0; j < 3; ++j) {
      State<N> y;
      for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + z[j * N + i];
      sys.rhs(t + tab.c[j] * h, y, f[j]);
      sys.jacobian(t + tab.c[j] * h, y, jac[j]);
      if (!finite<N>(f[j])) return false;
    }
    std::array<std::array<double, M>, M> a{};
    std::array<double, M> r{};
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = z[s * N + i];
        for (std::size_t j = 0; j < 3; ++j) acc -= h * tab.a[s][j] * f[j][i];
        r[s * N + i] = -acc;
        for (std::size_t j = 0; j < 3; ++j)
          for (std::size_t k = 0; k < N; ++k)
            a[s * N + i][j * N + k] = (s == j && i == k ? 1.0 : 0.0) - h * tab.a[s][j] * jac[j][i][k];
      }
    }
    if (!solve_dense<M>(a, r)) return false;
    double worst = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        z[s * N + i] += r[s * N + i];
        const double sc = ctl.tol * std::max(ctl.floor[i], std::abs(x[i]));
        worst = std::max(worst, std::abs(r[s * N + i]) / sc);
      }
    }
    if (!std::isfinite(worst)) return false;
    if (worst < 1e-3) {
      for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + z[2 * N + i];
      return finite<N>(out);
    }
  }
  return false;
}

struct DopriTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// One Dormand-Prince step from (t, x) with k1 = f(t, x); returns the error vector in err.
template <std::size_t N, class System>
void dopri_step(const System& sys, double t, const State<N>& x, const State<N>& k1, double h, State<N>& out,
                State<N>& err) {
  using T = DopriTableau;
  State<N> k2, k3, k4, k5, k6, k7, y;
  for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + h * T::a21 * k1[i];
  sys.rhs(t + T::c2 * h, y, k2);
  for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
  sys.rhs(t + T::c3 * h, y, k3);
  for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
  sys.rhs(t + T::c4 * h, y, k4);
  for (std::size_t i = 0; i < N; ++i)
    y[i] = x[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
  sys.rhs(t + T::c5 * h, y, k5);
  for (std::size_t i = 0; i < N; ++i)
    y[i] = x[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] + T::a65 * k5[i]);
  sys.rhs(t + h, y, k6);
  for (std::size_t i = 0; i < N; ++i)
    out[i] = x[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] + T::b4 * k4[i] + T::b5 * k5[i] + T::b6 * k6[i]);
  sys.rhs(t + h, out, k7);
  for (std::size_t i = 0; i < N; ++i)
    err[i] = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
}

}  // namespace detail

// System concept:
//   void rhs(double t, const State<N>& x, State<N>& dx) const;
//   void jacobian(double t, const State<N>& x, Matrix<N>& J) const;   (radau5 only)
//   bool admissible(double t, const State<N>& x) const;
// Integrates from t0 to t1 (either direction). Throws IntegrationError carrying
// the abscissa where the step size collapsed or the step budget ran out.
template <std::size_t N, class System>
Trajectory<N> integrate(const System& sys, double t0, const State<N>& x0, double t1, const Control<N>& ctl,
                        Method method = Method::radau5) {
  Trajectory<N> traj;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> stops;
  for (double b : ctl.breakpoints)
    if ((b - t0) * dir > 0.0 && (t1 - b) * dir > 0.0) stops.push_back(b);
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });
  stops.push_back(t1);
  std::size_t next_stop = 0;

  double t = t0;
  State<N> x = x0;
  State<N> fx;
  sys.rhs(t, x, fx);
  traj.t.push_back(t);
  traj.x.push_back(x);
  traj.dx.push_back(fx);

  double h = std::min(std::abs(ctl.h_init), ctl.h_max);
  double err_prev = 1.0;
  bool last_rejected = false;
  const double order = method == Method::radau5 ? 6.0 : 5.0;

  while (next_stop < stops.size()) {
    const double target = stops[next_stop];
    const double remaining = std::abs(target - t);
    if (remaining <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      ++next_stop;
      continue;
    }
    if (traj.accepted + traj.rejected >= ctl.max_steps)
      throw IntegrationError("step budget exhausted (stiff or singular problem)", t);
    bool hits = false;
    double step = h;
    if (step >= remaining) {
      step = remaining;
      hits = true;
    } else if (step > 0.5 * remaining) {
      step = 0.5 * remaining;
    }
    if (step < 1e-14 * std::max(std::abs(t), 1e-300))
      throw IntegrationError("step size underflow", t);
    const double hs = dir * step;

    State<N> x_big{}, x_mid{}, x_new{}, err{};
    bool ok = true;
    double err_norm = 0.0;
    if (method == Method::radau5) {
      ok = detail::radau_step<N>(sys, t, x, hs, ctl, x_big) && detail::radau_step<N>(sys, t, x, 0.5 * hs, ctl, x_mid) &&
           sys.admissible(t + 0.5 * hs, x_mid) &&
           detail::radau_step<N>(sys, t + 0.5 * hs, x_mid, 0.5 * hs, ctl, x_new);
      if (ok) {
        for (std::size_t i = 0; i < N; ++i) err[i] = (x_new[i] - x_big[i]) / 31.0;
        err_norm = detail::scaled_norm<N>(err, x, x_new, ctl);
      }
    } else {
      State<N> err_half;
      detail::dopri_step<N>(sys, t, x, fx, hs, x_new, err);
      detail::dopri_step<N>(sys, t, x, fx, 0.5 * hs, x_mid, err_half);
      ok = detail::finite<N>(x_new) && detail::finite<N>(x_mid) && detail::finite<N>(err);
      if (ok) err_norm = detail::scaled_norm<N>(err, x, x_new, ctl);
    }
    ok = ok && std::isfinite(err_norm) && sys.admissible(t + hs, x_new);
    if (!ok) {
      h = 0.25 * step;
      ++traj.rejected;
      last_rejected = true;
      continue;
    }

    State<N> f_new, f_mid;
    sys.rhs(t + hs, x_new, f_new);
    sys.rhs(t + 0.5 * hs, x_mid, f_mid);
    double interp_norm = 0.0;
    if (ctl.interp_control) {
      State<N> diff;
      for (std::size_t i = 0; i < N; ++i)
        diff[i] = interp::hermite_value(t, t + hs, x[i], x_new[i], fx[i], f_new[i], t + 0.5 * hs) - x_mid[i];
      // emitted intervals are h/2 long: cubic Hermite error shrinks by 2^4
      interp_norm = detail::scaled_norm<N>(diff, x, x_new, ctl) / 16.0;
    }

    const double e = std::max(err_norm, 1e-10);
    double fac = 0.9 * std::pow(e, -0.7 / order) * std::pow(err_prev, 0.4 / order);
    if (ctl.interp_control && interp_norm > 0.0)
      fac = std::min(fac, 0.9 * std::pow(ctl.interp_factor / interp_norm, 0.25));
    fac = std::clamp(fac, 0.2, 5.0);

    if (err_norm > 1.0 || interp_norm > ctl.interp_factor) {
      h = step * std::min(fac, 0.9);
      ++traj.rejected;
      last_rejected = true;
      continue;
    }

    ++traj.accepted;
    traj.t.push_back(t + 0.5 * hs);
    traj.x.push_back(x_mid);
    traj.dx.push_back(f_mid);
    t = hits ? target : t + hs;
    x = x_new;
    fx = f_new;
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.dx.push_back(fx);
    err_prev = e;
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    h = std::min(step * fac, ctl.h_max);
    if (hits) ++next_stop;
  }
  return traj;
}

}  // namespace warplab::ode
