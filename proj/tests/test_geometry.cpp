#include "gmtlab/errors.hpp"
#include "gmtlab/geometry.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gmtlab;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

Mat random_rotation(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace

TEST(Manifold, MembershipAndProjection) {
  const auto s = ManifoldDescriptor::sphere(2, 2.0);
  EXPECT_TRUE(s.contains(v({0, 0, 2})));
  EXPECT_FALSE(s.contains(v({0, 0, 1.9})));
  EXPECT_NEAR(s.project(v({3, 0, 0})).norm(), 2.0, 1e-14);

  const auto cone = ManifoldDescriptor::kp_cone();
  EXPECT_TRUE(cone.contains(v({0.6, 0, 0.8, 1})));
  EXPECT_FALSE(cone.contains(v({1, 0, 0, 0})));
  ASSERT_EQ(cone.singular_points().size(), 1u);
  EXPECT_EQ(cone.singular_points()[0].norm(), 0.0);
}

TEST(Manifold, PlacedRoundTrip) {
  const Mat R = random_rotation(4, 7);
  const Vec t = v({0.1, -0.2, 0.3, 0.4});
  const auto s = ManifoldDescriptor::sphere(3, 1.0).placed(R, t);
  const Vec p = s.to_ambient(v({0, 0, 0, 1}));
  EXPECT_TRUE(s.contains(p));
  EXPECT_LT((s.to_canonical(p) - v({0, 0, 0, 1})).norm(), 1e-14);
}

TEST(Manifold, RejectsBadParameters) {
  EXPECT_THROW(ManifoldDescriptor::sphere(2, -1.0), Error);
  EXPECT_THROW(ManifoldDescriptor::plane(3, 2), Error);
}

TEST(Chart, SphereAreaElement) {
  const auto s = ManifoldDescriptor::sphere(2, 1.0);
  const GraphChart chart = graph_chart_at(s, v({0, 0, -1}), 0.9);
  for (double t : {0.0, 0.25, 0.5, 0.8}) {
    const Vec u = v({t / std::sqrt(2.0), t / std::sqrt(2.0)});
    EXPECT_NEAR(area_element(chart, u), oracle::sphere_area_element(t), 1e-12) << t;
  }
  EXPECT_NEAR(area_element(chart, v({0.5, 0})), 1.1547005383792517, 1e-15);
}

TEST(Chart, PointsLieOnManifold) {
  const auto cone = ManifoldDescriptor::kp_cone();
  const Vec z = v({0.6, 0, 0.8, 1}) / std::sqrt(2.0);
  const GraphChart chart = graph_chart_at(cone, z, safe_chart_radius(cone, z));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int i = 0; i < 50; ++i) {
    const Vec p = chart.to_ambient(v({u(rng), u(rng), u(rng)}));
    EXPECT_NEAR(cone.implicit_residual(p), 0.0, 1e-12);
  }
}

TEST(Chart, VertexHasNoChart) {
  const auto cone = ManifoldDescriptor::kp_cone();
  EXPECT_THROW(graph_chart_at(cone, Vec::Zero(4), 0.1), Error);
}

TEST(Curvature, SphereMeanCurvature) {
  for (double rho : {0.5, 1.0, 2.0}) {
    const auto s = ManifoldDescriptor::sphere(2, rho);
    const CurvatureReport c = curvature_at(s, v({0, rho, 0}));
    EXPECT_NEAR(c.norm_H, 1.0 / rho, 1e-12 / rho);
    // Points toward the centre.
    EXPECT_LT(c.mean_curvature.dot(v({0, 1, 0})), 0.0);
  }
}

TEST(Curvature, PlaneIsFlat) {
  const auto p = ManifoldDescriptor::plane(2, 3);
  EXPECT_LE(curvature_at(p, v({0.3, -2, 0})).norm_H, 1e-14);
}

TEST(Curvature, ConeSmoothPoint) {
  // Regular part of the cone: |H| = (1/k) * 2/|x| at a point at distance |x|.
  const auto cone = ManifoldDescriptor::kp_cone();
  for (double s : {0.5, 1.0, 2.0}) {
    const Vec z = s * v({0, 0.6, -0.8, -1}) / std::sqrt(2.0);
    EXPECT_NEAR(curvature_at(cone, z).norm_H, 2.0 / (3.0 * z.norm()), 1e-10);
  }
}

TEST(Curvature, TraceFormulaAgrees) {
  const auto s = ManifoldDescriptor::sphere(2, 1.0).placed(random_rotation(3, 3), v({1, 2, 3}));
  const Vec z = s.to_ambient(v({0, 0, 1}));
  const GraphChart chart = graph_chart_at(s, z, 0.5);
  const Vec fd = mean_curvature_trace_formula(chart, Vec::Zero(2));
  EXPECT_LT((fd - mean_curvature_vector(chart)).norm(), 1e-6);
}

TEST(Curvature, RotationCovariance) {
  const auto base = ManifoldDescriptor::sphere(3, 1.5);
  const Mat R = random_rotation(4, 5);
  const auto moved = base.placed(R, Vec::Zero(4));
  const Vec z = v({0, 0, 1.5, 0});
  const CurvatureReport a = curvature_at(base, z);
  const CurvatureReport b = curvature_at(moved, R * z);
  EXPECT_NEAR(a.norm_H, b.norm_H, 1e-12);
  EXPECT_LT((R * a.mean_curvature - b.mean_curvature).norm(), 1e-12);
}

TEST(Curvature, ScalingCovariance) {
  const auto base = ManifoldDescriptor::sphere(2, 1.0);
  const Vec z = v({1, 0, 0});
  for (double lambda : {0.25, 3.0}) {
    const auto big = base.dilated(lambda);
    EXPECT_NEAR(curvature_at(big, lambda * z).norm_H,
                curvature_at(base, z).norm_H / lambda, 1e-12);
  }
}
