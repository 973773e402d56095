#include "gmtlab/moments.hpp"

#include "gmtlab/errors.hpp"

#include <cmath>
#include <numbers>

namespace gmtlab {

double unit_ball_volume(int k) {
  if (k < 0) throw Error(ErrorKind::precondition, "dimension must be nonnegative");
  const double h = 0.5 * k;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double uniform_second_moment(int k, double r) {
  return k * unit_ball_volume(k) / (k + 2) * std::pow(r, k + 2);
}

MomentSet moment_set(const MeasureSpec& mu, const BallRegion& region,
                     const QuadratureOptions& options) {
  const int n1 = mu.manifold.ambient_dim();
  const int k = mu.k;
  const double r = region.radius;
  if (!(r > 0.0)) throw Error(ErrorKind::precondition, "radius must be positive");

  // Layout: [1, |d|^2, (r^2 - |d|^2) d, upper triangle of d d^T].
  const int tri = n1 * (n1 + 1) / 2;
  constexpr int b_at = 2;
  const int m_at = b_at + n1;
  BallIntegrand f;
  f.output_dim = m_at + tri;
  f.component_scale.assign(f.output_dim, r * r);
  f.component_scale[0] = 1.0;
  for (int i = 0; i < n1; ++i) f.component_scale[b_at + i] = r * r * r;
  const Vec z = region.center;
  f.eval = [z, r, n1, m_at](const Vec& y, std::span<double> out) {
    const Vec d = y - z;
    const double d2 = d.squaredNorm();
    out[0] = 1.0;
    out[1] = d2;
    for (int i = 0; i < n1; ++i) out[b_at + i] = (r * r - d2) * d[i];
    int at = m_at;
    for (int i = 0; i < n1; ++i) {
      for (int j = i; j < n1; ++j) out[at++] = d[i] * d[j];
    }
  };

  const QuadratureResult q = integrate_over_ball(mu.manifold, region, f, options);
  const Vec v = mu.c * q.value;
  const Vec e = mu.c * q.error;

  MomentSet m;
  m.region = region;
  m.mass = v[0];
  m.mass_error = e[0];
  m.second_moment = v[1];
  m.second_moment_error = e[1];
  m.b_tilde = v.segment(b_at, n1);
  m.b_tilde_error = e.segment(b_at, n1);
  const double scale = (k + 2) / (2.0 * unit_ball_volume(k) * std::pow(r, k + 2));
  m.b = scale * m.b_tilde;
  m.b_error = scale * m.b_tilde_error;
  m.second_moment_matrix = Mat::Zero(n1, n1);
  m.second_moment_matrix_error = Mat::Zero(n1, n1);
  int at = m_at;
  for (int i = 0; i < n1; ++i) {
    for (int j = i; j < n1; ++j, ++at) {
      m.second_moment_matrix(i, j) = m.second_moment_matrix(j, i) = v[at];
      m.second_moment_matrix_error(i, j) = m.second_moment_matrix_error(j, i) = e[at];
    }
  }
  m.coord_second = m.second_moment_matrix.diagonal();
  m.coord_second_error = m.second_moment_matrix_error.diagonal();
  m.evaluations = q.evaluations;
  m.converged = q.converged;
  return m;
}

QFormResult q_form(const MomentSet& moments, int k, QNormalization normalization) {
  const double r = moments.region.radius;
  const double scale = normalization == QNormalization::normalized
                           ? (k + 2) / (unit_ball_volume(k) * std::pow(r, k + 2))
                           : 1.0;
  return {moments.region, scale * moments.second_moment_matrix,
          scale * moments.second_moment_matrix_error, normalization};
}

QFormResult q_form(const MeasureSpec& mu, const BallRegion& region,
                   QNormalization normalization, const QuadratureOptions& options) {
  return q_form(moment_set(mu, region, options), mu.k, normalization);
}

}  // namespace gmtlab
