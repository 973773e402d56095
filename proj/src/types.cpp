#include "gmtlab/types.hpp"

#include <vector>

namespace gmtlab {

namespace {
constexpr double kDependent = 1e-10;
}

Mat orthonormalize_columns(const Mat& spanning) {
  Mat basis(spanning.rows(), 0);
  for (Eigen::Index c = 0; c < spanning.cols(); ++c) {
    Vec v = spanning.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index b = 0; b < basis.cols(); ++b) {
        v -= basis.col(b).dot(v) * basis.col(b);
      }
    }
    if (v.norm() <= kDependent * original) continue;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / v.norm();
  }
  return basis;
}

Mat orthonormal_complement(const Mat& orthonormal, int first_candidate) {
  const Eigen::Index n = orthonormal.rows();
  Mat basis = orthonormal;
  std::vector<bool> used(n, false);
  // Greedy: always take the standard basis vector with the largest residual,
  // ties broken in candidate order starting from `first_candidate`.
  while (basis.cols() < n) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    Vec best_residual;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index cand = (first_candidate + i) % n;
      if (used[cand]) continue;
      Vec v = Vec::Unit(n, cand);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index b = 0; b < basis.cols(); ++b) {
          v -= basis.col(b).dot(v) * basis.col(b);
        }
      }
      if (v.norm() > best_norm + 1e-14) {
        best = cand;
        best_norm = v.norm();
        best_residual = v;
      }
    }
    used[best] = true;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = best_residual / best_norm;
  }
  return basis.rightCols(n - orthonormal.cols());
}

}  // namespace gmtlab
