#pragma once

#include <Eigen/Dense>

#include <vector>

namespace gmtlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Closed ball B(center, radius) in ambient coordinates.
struct BallRegion {
  Vec center;
  double radius = 0.0;
};

/// Gram-Schmidt on the columns of `spanning`; returns an orthonormal basis of
/// their span with the orientation of the leading columns preserved.
Mat orthonormalize_columns(const Mat& spanning);

/// Orthonormal basis (ambient_dim x (ambient_dim - cols)) of the orthogonal
/// complement of an orthonormal column set, completed from the standard basis
/// starting at index `first_candidate`.
Mat orthonormal_complement(const Mat& orthonormal, int first_candidate = 0);

}  // namespace gmtlab
