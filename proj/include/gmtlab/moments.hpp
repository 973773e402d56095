#pragma once

#include "gmtlab/measure.hpp"
#include "gmtlab/quadrature.hpp"
#include "gmtlab/types.hpp"

namespace gmtlab {

/// w_k = pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(int k);

/// Moments of mu over B(z, r), all taken relative to the centre z.
struct MomentSet {
  BallRegion region;
  double mass = 0.0;
  double mass_error = 0.0;
  /// int |y - z|^2
  double second_moment = 0.0;
  double second_moment_error = 0.0;
  /// int (r^2 - |y - z|^2)(y - z), and b = (k+2)/(2 w_k r^{k+2}) b_tilde.
  Vec b_tilde;
  Vec b_tilde_error;
  Vec b;
  Vec b_error;
  /// int (y - z)(y - z)^T; coord_second is its diagonal.
  Mat second_moment_matrix;
  Mat second_moment_matrix_error;
  Vec coord_second;
  Vec coord_second_error;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// All moments from one vector-valued quadrature.
MomentSet moment_set(const MeasureSpec& mu, const BallRegion& region,
                     const QuadratureOptions& options = {});

enum class QNormalization { normalized, unnormalized };

/// Q(x) = x^T matrix x.
struct QFormResult {
  BallRegion region;
  Mat matrix;
  Mat error;
  QNormalization normalization = QNormalization::normalized;

  double evaluate(const Vec& x) const { return x.dot(matrix * x); }
};

/// Converts the second-moment matrix of `moments` without new quadrature.
QFormResult q_form(const MomentSet& moments, int k, QNormalization normalization);
QFormResult q_form(const MeasureSpec& mu, const BallRegion& region,
                   QNormalization normalization = QNormalization::normalized,
                   const QuadratureOptions& options = {});

/// (k w_k / (k+2)) r^{k+2}: the second moment of a k-uniform ball.
double uniform_second_moment(int k, double r);

}  // namespace gmtlab
