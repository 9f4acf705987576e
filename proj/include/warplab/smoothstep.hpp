#pragma once

namespace warplab {

// Quintic smoothstep S(x) = 6x^5 - 15x^4 + 10x^3 clamped to [0, 1]; C^2.
inline double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

inline double smoothstep_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double u = x * (1.0 - x);
  return 30.0 * u * u;
}

inline double smoothstep_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

inline constexpr double kSmoothstepSupD1 = 15.0 / 8.0;
// attained at x = 1/2 - 1/(2 sqrt 3)
inline constexpr double kSmoothstepSupD2 = 5.773502691896257645;  // 10 / sqrt(3)

}  // namespace warplab
