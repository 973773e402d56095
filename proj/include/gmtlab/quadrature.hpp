#pragma once

#include "gmtlab/geometry.hpp"
#include "gmtlab/parallel.hpp"
#include "gmtlab/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gmtlab {

enum class QuadratureMethod { adaptive_cubature, monte_carlo, closed_form };

const char* to_string(QuadratureMethod method) noexcept;

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Value and nonnegative error estimate of one (possibly vector-valued)
/// integral. `converged` is false when the tolerance was not reached; the
/// best available value is still returned.
struct QuadratureResult {
  Vec value;
  Vec error;
  std::size_t evaluations = 0;
  QuadratureMethod method = QuadratureMethod::adaptive_cubature;
  bool converged = true;
  std::optional<std::uint64_t> seed;

  double scalar() const { return value[0]; }
  double scalar_error() const { return error[0]; }
};

/// Vector-valued integrand on ambient points. `eval` must be pure; it may be
/// called concurrently.
struct BallIntegrand {
  int output_dim = 1;
  std::function<void(const Vec& y, std::span<double> out)> eval;
  /// Typical magnitude per component for error control; empty means ones.
  std::vector<double> component_scale;
};

BallIntegrand scalar_integrand(std::function<double(const Vec&)> f);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_intervals = 400;
  ExecPolicy policy = ExecPolicy::parallel;
};

/// A star-shaped parametrization u -> point(u) around a centre point
/// (point(0) = centre) together with its area element. Balls are integrated in
/// polar coordinates u = t * omega with the radial limit found by root finding.
struct PolarPatch {
  int k = 0;
  double max_radius = 0.0;
  Vec center;
  std::function<Vec(const Vec& u)> point;
  std::function<double(const Vec& u)> jacobian;
};

PolarPatch polar_patch(const GraphChart& chart);

/// int_{M cap B(z, r)} f dH^k for a support-centred ball. Dispatches to exact
/// boundary-fitted coordinates: polar coordinates on planes, geodesic caps on
/// spheres, nappe coordinates on the cone and graph-polar coordinates on
/// polynomial graphs.
QuadratureResult integrate_over_ball(const ManifoldDescriptor& m,
                                     const BallRegion& region,
                                     const BallIntegrand& f,
                                     const QuadratureOptions& options = {});

/// Both nappes of the cone in (s, omega) coordinates with area element
/// sqrt(2) s^2 ds d(omega); the region may contain the vertex.
QuadratureResult integrate_cone_ball(const ManifoldDescriptor& cone,
                                     const BallRegion& region,
                                     const BallIntegrand& f,
                                     const QuadratureOptions& options = {});
QuadratureResult integrate_cone_ball(const BallRegion& region,
                                     const BallIntegrand& f,
                                     const QuadratureOptions& options = {});

/// Generic route through a patch; independent of the per-kind coordinates
/// above and used to cross-check them.
QuadratureResult integrate_over_patch_ball(const PolarPatch& patch,
                                           double radius,
                                           const BallIntegrand& f,
                                           const QuadratureOptions& options = {});

/// Stratified Monte Carlo over coordinate boxes that contain the ball preimage;
/// the ball is imposed by its indicator. Error estimate is the sample standard
/// error. Bitwise reproducible for a fixed seed under either policy.
QuadratureResult monte_carlo_fallback(const ManifoldDescriptor& m,
                                      const BallRegion& region,
                                      const BallIntegrand& f,
                                      std::size_t samples,
                                      std::uint64_t seed = kDefaultSeed,
                                      ExecPolicy policy = ExecPolicy::parallel);

}  // namespace gmtlab
