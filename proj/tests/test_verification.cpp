#include "gmtlab/errors.hpp"
#include "gmtlab/measure.hpp"
#include "gmtlab/verification.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gmtlab;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

QuadratureOptions tight(ExecPolicy policy = ExecPolicy::parallel) {
  QuadratureOptions o;
  o.rel_tol = 1e-11;
  o.policy = policy;
  return o;
}

}  // namespace

TEST(Uniformity, S3IsNotUniform) {
  const MeasureSpec mu = builtin("s3_in_r4");
  const auto rep = check_local_uniform(mu, {v({0, 0, 0, -1})}, {0.5, 1.0}, 1e-6, tight());
  EXPECT_EQ(rep.verdict, UniformityVerdict::not_uniform);
  const double expect = oracle::s3_cap(1.0) / oracle::uniform_mass(3, 1.0) - 1.0;
  EXPECT_NEAR(rep.points.back().deviation, expect, 1e-10);
  EXPECT_NEAR(rep.points.back().deviation, -0.07872272604343256, 1e-10);
}

TEST(Uniformity, UnconvergedMakesInconclusive) {
  MassSample s{v({0, 0, 0}), 0.5, oracle::uniform_mass(2, 0.5), 0.0, false, 0};
  EXPECT_EQ(uniformity_from_samples("p", 2, {s}, 1e-6).verdict,
            UniformityVerdict::inconclusive);
  MassSample bad = s;
  bad.converged = true;
  bad.mass *= 1.1;
  EXPECT_EQ(uniformity_from_samples("p", 2, {s, bad}, 1e-6).verdict,
            UniformityVerdict::not_uniform);
}

TEST(Uniformity, GridSerialParallelBitwise) {
  const MeasureSpec mu = builtin("kp_cone");
  const auto centers = default_centers(mu);
  const auto a = ball_mass_grid(mu, centers, {0.3, 0.7}, tight(ExecPolicy::serial));
  const auto b = ball_mass_grid(mu, centers, {0.3, 0.7}, tight(ExecPolicy::parallel));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mass, b[i].mass);
    EXPECT_EQ(a[i].error, b[i].error);
    EXPECT_EQ(a[i].radius, b[i].radius);
  }
}

TEST(Distribution, PlantedDefectIsCaught) {
  const MeasureSpec mu = builtin("sphere");
  auto samples = ball_mass_grid(mu, default_centers(mu), {0.2, 0.6}, tight());
  EXPECT_EQ(distribution_from_samples("s", samples, 1e-6).verdict, Verdict::pass);
  // Double every mass of the second centre.
  for (auto& s : samples) {
    if ((s.center - samples[2].center).norm() == 0.0) s.mass *= 2.0;
  }
  const auto rep = distribution_from_samples("s", samples, 1e-6);
  EXPECT_EQ(rep.verdict, Verdict::fail);
  EXPECT_NEAR(rep.max_relative_difference, 0.5, 1e-9);
}

TEST(Density, PlaneWithConstant) {
  MeasureSpec mu = builtin("plane");
  mu.c = 3.0;
  const auto profile = radial_profile(mu, Vec::Zero(3), geometric_radii(1, 10), tight());
  const DensityLimits d = density_limits(profile, 2);
  EXPECT_NEAR(d.c, 3.0, 1e-10);
  EXPECT_NEAR(d.K, 0.75, 1e-10);
  for (const auto& s : d.samples) EXPECT_LE(s.pairing_residual, 1e-12);
}

TEST(Density, S3ExtrapolatesToOne) {
  const MeasureSpec mu = builtin("s3_in_r4");
  const auto profile =
      radial_profile(mu, v({0, 0, 0, -1}), geometric_radii(1, 10), tight());
  EXPECT_NEAR(density_limits(profile, 3).c, 1.0, 1e-8);
}

TEST(Density, NeedsTwoDecades) {
  const MeasureSpec mu = builtin("plane");
  const auto profile = radial_profile(mu, Vec::Zero(3), {0.1, 0.2, 0.4, 0.8}, tight());
  EXPECT_THROW(density_limits(profile, 2), Error);
}

TEST(Dimension, SlopesMatchK) {
  const auto radii = geometric_radii(3, 10);
  EXPECT_NEAR(dimension_probe(radial_profile(builtin("plane"), Vec::Zero(3), radii)).slope,
              2.0, 1e-9);
  EXPECT_NEAR(dimension_probe(radial_profile(builtin("kp_cone"), Vec::Zero(4), radii)).slope,
              3.0, 1e-9);
}

TEST(Identities, SphereKeyEqualityClosedForm) {
  const MeasureSpec mu = builtin("sphere");
  for (double r : {0.1, 0.25, 0.4}) {
    const IdentityCase c = key_equality_residual(mu, v({0, 0, -1}), r, tight());
    EXPECT_NEAR(c.lhs, oracle::s2_b_tilde(r), 1e-12);
    EXPECT_NEAR(c.rhs, oracle::s2_b_tilde(r), 1e-12);
  }
}

TEST(Identities, KeyEqualityNeedsSmallRadius) {
  EXPECT_THROW(key_equality_residual(builtin("sphere"), v({0, 0, -1}), 0.6), Error);
}

TEST(Identities, HessianMomentOnSphere) {
  const MeasureSpec mu = builtin("sphere");
  const auto dirs = default_tangent_directions(2, 12, 77);
  ASSERT_EQ(dirs.size(), 14u);
  for (const auto& d : dirs) EXPECT_NEAR(d.norm(), 1.0, 1e-15);
  const double r = 0.4;
  for (const auto& c : hessian_moment_residual(mu, v({1, 0, 0}), r, dirs, tight())) {
    EXPECT_NEAR(c.lhs, oracle::s2_b(r), 1e-10);
    EXPECT_NEAR(c.rhs, oracle::s2_b(r), 1e-10);  // 1 - Q(e) = r^2/6
  }
}

TEST(Identities, DirectionsAreSeeded) {
  const auto a = default_tangent_directions(3, 5, 1);
  const auto b = default_tangent_directions(3, 5, 1);
  const auto c = default_tangent_directions(3, 5, 2);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(a.back(), c.back());
}

TEST(Identities, OrthogonalityHoldsOnCone) {
  const MeasureSpec mu = builtin("kp_cone");
  const Vec z = v({-0.48, 0.6, 0.64, 1}) / std::sqrt(2.0);
  const IdentityCase c = orthogonality_check(mu, z, 0.3, tight());
  EXPECT_LE(c.residual, 1e-9 * (1 + c.rhs));
  EXPECT_GT(c.rhs, 0.0);
}

TEST(Identities, OrthogonalityFailsOffUniform) {
  // Graph with a cubic term: b picks up a tangential part.
  const auto m = ManifoldDescriptor::polynomial_graph(2, 3, {{0, {3, 0}, 1.0}});
  const MeasureSpec mu = make_measure(m, 1.0, "cubic");
  const IdentityCase c = orthogonality_check(mu, m.to_ambient(v({0.2, 0, 0.008})), 0.2,
                                             tight());
  EXPECT_GT(c.residual, 1e-6);
}

TEST(Identities, TaylorBoundStableOnSphere) {
  const MeasureSpec mu = builtin("sphere");
  const Vec z = v({0, 0, -1});
  const auto rep = taylor_bound_check(mu, z, 0.4, default_taylor_probes(mu.manifold, z, 0.4),
                                      tight());
  EXPECT_TRUE(rep.stable);
  EXPECT_TRUE(std::isfinite(rep.empirical_constant));
  for (const auto& p : rep.probes) EXPECT_LE(p.distance, 0.2 + 1e-12);
}

TEST(Sucp, PlaneFlatSphereCurved) {
  SucpOptions opt;
  opt.quadrature = tight();
  const auto plane = sucp_probe(builtin("plane"), {Vec::Zero(3)}, opt);
  EXPECT_EQ(plane.points[0].status, SucpStatus::flat_confirmed);
  // One link per chain ball and radius.
  EXPECT_EQ(plane.points[0].chain.size(), 3u * opt.radii.size());
  const auto sphere = sucp_probe(builtin("sphere:2:2"), {v({0, 0, 2})}, opt);
  EXPECT_EQ(sphere.points[0].status, SucpStatus::curvature_nonvanishing);
  EXPECT_NEAR(sphere.min_norm_H, 0.5, 1e-10);
}

TEST(Wucp, PlaneWithDensityTwo) {
  MeasureSpec mu = builtin("plane");
  mu.c = 2.0;
  WucpOptions opt;
  opt.quadrature = tight();
  const WucpReport rep = wucp_probe(mu, Vec::Zero(3), 1.0, opt);
  EXPECT_TRUE(rep.hypothesis_holds);
  ASSERT_TRUE(rep.density.has_value());
  EXPECT_NEAR(rep.density->c, 2.0, 1e-10);
  EXPECT_NEAR(rep.density->K, 2.0 / 3.0, 1e-10);
  EXPECT_EQ(rep.verdict, WucpVerdict::flat_continuation_confirmed);
}

TEST(Wucp, SphereFailsHypothesis) {
  const WucpReport rep = wucp_probe(builtin("sphere"), v({0, 0, -1}), 1.0);
  EXPECT_FALSE(rep.hypothesis_holds);
  EXPECT_EQ(rep.verdict, WucpVerdict::hypothesis_fails);
}
