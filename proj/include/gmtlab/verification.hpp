#pragma once

#include "gmtlab/geometry.hpp"
#include "gmtlab/measure.hpp"
#include "gmtlab/moments.hpp"
#include "gmtlab/quadrature.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gmtlab {

enum class Verdict { pass, fail, inconclusive };
enum class UniformityVerdict { locally_uniform, not_uniform, inconclusive };

const char* to_string(Verdict v) noexcept;
const char* to_string(UniformityVerdict v) noexcept;

// ---------------------------------------------------------------------------
// Ball-mass grids

struct MassSample {
  Vec center;
  double radius = 0.0;
  double mass = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

/// mu(B(x, r)) for every (centre, radius); centres vary slowest. Grid points
/// run concurrently under the parallel policy, results keep input order.
std::vector<MassSample> ball_mass_grid(const MeasureSpec& mu,
                                       const std::vector<Vec>& centers,
                                       const std::vector<double>& radii,
                                       const QuadratureOptions& options = {});

struct UniformityPoint {
  MassSample sample;
  /// mu(B(x, r)) / (w_k r^k) - 1
  double deviation = 0.0;
  double deviation_error = 0.0;
};

struct UniformityReport {
  std::string label;
  int k = 0;
  double tol = 0.0;
  std::vector<UniformityPoint> points;
  double max_abs_deviation = 0.0;
  UniformityVerdict verdict = UniformityVerdict::inconclusive;
};

UniformityReport check_local_uniform(const MeasureSpec& mu,
                                     const std::vector<Vec>& centers,
                                     const std::vector<double>& radii, double tol,
                                     const QuadratureOptions& options = {});
/// Verdict from precomputed masses. A point counts as uniform when
/// |deviation| <= tol + deviation_error; unconverged points make the run
/// inconclusive unless some converged point already fails.
UniformityReport uniformity_from_samples(std::string label, int k,
                                         std::vector<MassSample> samples,
                                         double tol);

struct PairwiseComparison {
  double radius = 0.0;
  std::size_t first = 0;
  std::size_t second = 0;
  double difference = 0.0;
  double allowed = 0.0;
};

struct DistributionReport {
  std::string label;
  double tol = 0.0;
  std::vector<MassSample> samples;
  /// Worst pair at each radius, in increasing radius order.
  std::vector<PairwiseComparison> worst_pairs;
  /// max |m_i - m_j| / max(m_i, m_j) over all pairs at equal radius.
  double max_relative_difference = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

DistributionReport check_uniformly_distributed(
    const MeasureSpec& mu, const std::vector<Vec>& centers,
    const std::vector<double>& radii, double tol,
    const QuadratureOptions& options = {});
/// Pairs pass when |m_i - m_j| <= tol * max(m_i, m_j) + e_i + e_j.
DistributionReport distribution_from_samples(std::string label,
                                             std::vector<MassSample> samples,
                                             double tol);

// ---------------------------------------------------------------------------
// Density limits and dimension

struct DensitySample {
  double radius = 0.0;
  double mass = 0.0;
  /// g / (g + w_k r^k)
  double K = 0.0;
  /// g / (w_k r^k)
  double c = 0.0;
  /// |1/c - (1/K - 1)| * c, zero up to rounding.
  double pairing_residual = 0.0;
};

struct DensityLimits {
  std::vector<DensitySample> samples;  // increasing radius
  double K = 0.0;
  double c = 0.0;
  /// Difference of the last two extrapolants.
  double K_spread = 0.0;
  double c_spread = 0.0;
  int columns = 0;
};

/// Extrapolates K and c to r = 0 by Neville-Richardson in h = r^2 with up to
/// three columns. Needs >= 4 radii spanning >= 2 decades; throws
/// NonConvergent if the last two extrapolants differ by more than
/// cauchy_tol * max(1, |value|).
DensityLimits density_limits(const RadialMassProfile& profile, int k,
                             double cauchy_tol = 1e-6);

struct DimensionEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t radii = 0;
};

/// Least-squares slope of log g against log r.
DimensionEstimate dimension_probe(const RadialMassProfile& profile);

// ---------------------------------------------------------------------------
// Identity residuals

/// One residual |lhs - rhs| with its propagated quadrature error.
struct IdentityCase {
  Vec center;
  double radius = 0.0;
  Vec direction;  // chart-frame tangent direction, empty when unused
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Tangent-aligned chart at a non-singular support point.
GraphChart identity_chart(const ManifoldDescriptor& m, const Vec& z);

/// int |y-z|^2 dmu against (k w_k/(k+2)) r^{k+2}.
IdentityCase elementary_identity_residual(const MeasureSpec& mu, const Vec& z,
                                          double r,
                                          const QuadratureOptions& options = {});

/// (1/2) sum_j b~^j Laplacian(phi_j)(0) against sum_j int y_j^2 dmu, normal
/// components in the chart frame at z.
IdentityCase key_equality_residual(const MeasureSpec& mu, const Vec& z, double r,
                                   const QuadratureOptions& options = {});

/// Chart axes followed by `random_count` seeded random unit vectors in R^k.
std::vector<Vec> default_tangent_directions(int k, int random_count = 8,
                                            std::uint64_t seed = kDefaultSeed);

/// sum_j b^j <Hess phi_j(0) e, e> against 1 - Q(e) for each chart-frame unit
/// direction e in R^k.
std::vector<IdentityCase> hessian_moment_residual(const MeasureSpec& mu, const Vec& z,
                                           double r,
                                           const std::vector<Vec>& directions,
                                           const QuadratureOptions& options = {});

/// lhs = |tangential part of b|, rhs = |normal part of b|, residual = lhs.
IdentityCase orthogonality_check(const MeasureSpec& mu, const Vec& z, double r,
                                 const QuadratureOptions& options = {});

struct TaylorProbe {
  Vec point;
  double distance = 0.0;  // |x - z|
  double lhs = 0.0;       // |<2b, x-z> + Q(x-z) - |x-z|^2|
  double ratio = 0.0;     // lhs * r / |x-z|^3
};

struct TaylorBoundReport {
  Vec center;
  double radius = 0.0;
  std::vector<TaylorProbe> probes;  // increasing distance
  double empirical_constant = 0.0;  // max ratio
  double fine_max = 0.0;            // max ratio over the nearer half
  double coarse_max = 0.0;          // max ratio over the farther half
  bool stable = false;
  std::size_t evaluations = 0;
};

/// Chart points at radii {1/8, 3/16, 1/4, 5/16, 3/8} r along the chart axes
/// and diagonals, all inside B(z, r/2).
std::vector<Vec> default_taylor_probes(const ManifoldDescriptor& m, const Vec& z,
                                       double r);

/// The constant is not known in closed form; the check passes when the max
/// ratio is finite and the nearer-half maximum does not exceed 1.2 times the
/// farther-half maximum (plus a 1e-9 floor). Probes outside B(z, r/2) throw.
TaylorBoundReport taylor_bound_check(const MeasureSpec& mu, const Vec& z, double r,
                                     const std::vector<Vec>& probe_points,
                                     const QuadratureOptions& options = {});

// ---------------------------------------------------------------------------
// Unique continuation probes

enum class SucpStatus { flat_confirmed, curved, curvature_nonvanishing };
const char* to_string(SucpStatus s) noexcept;

struct SucpOptions {
  double h_tol = 1e-8;
  /// Flatness threshold relative to the ball mass.
  double flat_tol = 1e-10;
  /// Number of balls in the chain, the starting ball included.
  int chain_length = 3;
  double chain_step = 0.4;
  std::vector<double> radii = {0.1, 0.25, 0.4};
  QuadratureOptions quadrature;
};

struct ChainLink {
  Vec center;
  double norm_H = 0.0;
  double radius = 0.0;
  double mass = 0.0;
  /// int dist(y, P)^2 dmu over the ball, P the plane detected at the start.
  double normal_moment = 0.0;
  double normal_moment_error = 0.0;
  bool flat = false;
};

struct SucpPoint {
  Vec point;
  double norm_H = 0.0;
  SucpStatus status = SucpStatus::curved;
  std::vector<ChainLink> chain;
};

struct SucpReport {
  std::string label;
  std::vector<SucpPoint> points;
  double min_norm_H = 0.0;
};

SucpReport sucp_probe(const MeasureSpec& mu, const std::vector<Vec>& scan_points,
                      const SucpOptions& options = {});

enum class WucpVerdict { flat_continuation_confirmed, hypothesis_fails, continuation_fails };
const char* to_string(WucpVerdict v) noexcept;

struct WucpOptions {
  /// Plane dimension to test; <= 0 means the measure's k.
  int k_guess = 0;
  /// Flat-patch threshold relative to the patch mass.
  double tol = 1e-10;
  double uniformity_tol = 1e-6;
  double cauchy_tol = 1e-6;
  int profile_radii = 8;
  SucpOptions sucp;
  QuadratureOptions quadrature;
};

struct WucpReport {
  std::string label;
  Vec z0;
  double r0 = 0.0;
  int k_guess = 0;
  double patch_mass = 0.0;
  /// Sum of the n+1-k smallest eigenvalues of the second-moment matrix.
  double normal_moment = 0.0;
  bool hypothesis_holds = false;
  std::optional<DensityLimits> density;
  std::optional<UniformityReport> rescaled_uniformity;
  std::optional<SucpReport> rescaled_sucp;
  WucpVerdict verdict = WucpVerdict::hypothesis_fails;
};

/// Flat-patch test on B(z0, r0); when flat, estimates c from the radial
/// profile at z0, rescales by 4/r0 and c, then checks uniformity and runs the
/// strong probe on the rescaled measure.
WucpReport wucp_probe(const MeasureSpec& mu, const Vec& z0, double r0,
                      const WucpOptions& options = {});

}  // namespace gmtlab
