#pragma once

// Closed forms used as test oracles. They are derived here independently of
// the library (no library headers), so a mistake in src/ cannot leak into the
// expected values.

#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Volume of the unit k-ball.
inline double unit_ball(int k) { return std::pow(pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0); }

// Flat k-plane, and any locally k-uniform measure: w_k r^k.
inline double uniform_mass(int k, double r) { return unit_ball(k) * std::pow(r, k); }

// int |y - z|^2 over a flat k-ball: k w_k r^(k+2) / (k+2).
inline double uniform_second_moment(int k, double r) {
  return k * unit_ball(k) * std::pow(r, k + 2) / (k + 2);
}

// Round S^2 of radius rho, ball centred on the sphere: Archimedes gives pi r^2
// for every r <= 2 rho.
inline double s2_cap(double r) { return pi * r * r; }

// Unit S^3 in R^4. A chord r subtends the polar angle t = 2 asin(r/2); the cap
// volume is 4 pi int_0^t sin^2 s ds = 2 pi (t - sin t cos t).
inline double s3_cap(double r) {
  const double t = 2.0 * std::asin(r / 2.0);
  return 2.0 * pi * (t - std::sin(t) * std::cos(t));
}

// Unit S^2, ball of radius r at a point z. Using the height u = 1 - cos s of a
// point above the tangent plane at z (dA = 2 pi du, chord^2 = 2u):
//   b~ (normal part, pointing into the sphere)
//     = int (r^2 - 2u) u 2 pi du over [0, r^2/2] = pi r^6 / 12,
//   b = 4 / (2 pi r^4) b~ = r^2 / 6.
inline double s2_b_tilde(double r) { return pi * std::pow(r, 6) / 12.0; }
inline double s2_b(double r) { return r * r / 6.0; }
// Q(e) for a unit tangent e: 1 - r^2/6 (sum of Q over an orthonormal frame is
// 4/(pi r^4) * pi r^4/2 = 2, the normal direction takes (4/(pi r^4)) int u^2
// 2 pi du = r^2/3, and the two tangent directions share the rest).
inline double s2_q_tangent(double r) { return 1.0 - r * r / 6.0; }

// Chart z = (u, sqrt(1 - |u|^2)) of the unit sphere: area element
// 1 / sqrt(1 - |u|^2).
inline double sphere_area_element(double u_norm) {
  return 1.0 / std::sqrt(1.0 - u_norm * u_norm);
}

// Cone {x4^2 = x1^2 + x2^2 + x3^2}, ball centred at the vertex. At distance t
// from the vertex a nappe meets the sphere |y| = t in a 2-sphere of radius
// t/sqrt 2, area 2 pi t^2; two nappes give 2 int_0^r 2 pi t^2 dt.
inline double cone_vertex_mass(double r) { return 4.0 * pi * r * r * r / 3.0; }

}  // namespace oracle
