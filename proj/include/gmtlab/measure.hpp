#pragma once

#include "gmtlab/geometry.hpp"
#include "gmtlab/quadrature.hpp"

#include <string>
#include <vector>

namespace gmtlab {

/// mu = c * H^k restricted to the manifold.
struct MeasureSpec {
  ManifoldDescriptor manifold;
  int k = 0;
  double c = 1.0;
  std::string label;
};

MeasureSpec make_measure(ManifoldDescriptor manifold, double c,
                         std::string label);

struct BuiltinParams {
  int k = 2;
  int ambient_dim = 3;
  double rho = 1.0;
};

/// Labels: "plane", "sphere", "s3_in_r4", "kp_cone". Compact forms
/// "plane:<k>:<n+1>" and "sphere:<k>:<rho>" override `params`.
MeasureSpec builtin(const std::string& label, const BuiltinParams& params = {});

/// mu~(A) = (1/c_est) (r0/4)^{-k} mu((r0/4) A): support dilated by 4/r0,
/// density divided by c_est.
MeasureSpec rescale(const MeasureSpec& mu, double r0, double c_est);

/// mu(B(z, r)) with error estimate.
QuadratureResult ball_mass(const MeasureSpec& mu, const Vec& z, double r,
                           const QuadratureOptions& options = {});

struct RadialSample {
  double radius = 0.0;
  double mass = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// g(r) = mu(B(p, r)) on a list of radii.
struct RadialMassProfile {
  Vec center;
  std::vector<RadialSample> samples;
};

/// Geometric grid {2^-m : m = first..last}, returned in increasing order.
std::vector<double> geometric_radii(int first = 1, int last = 10);

RadialMassProfile radial_profile(const MeasureSpec& mu, const Vec& p,
                                 std::vector<double> radii,
                                 const QuadratureOptions& options = {});

/// Catalogue support points used when a run does not name its own centres.
std::vector<Vec> default_centers(const MeasureSpec& mu);

}  // namespace gmtlab
