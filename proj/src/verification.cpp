#include "gmtlab/verification.hpp"

#include "gmtlab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gmtlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Error of <n, v> given componentwise errors of v.
double projected_error(const Vec& n, const Vec& err) {
  return n.cwiseAbs().dot(err);
}

void require_radius(double r) {
  if (!(r > 0.0 && r < 0.5)) {
    throw Error(ErrorKind::precondition,
                fmt::format("identity suites need 0 < r < 1/2, got {}", r));
  }
}

}  // namespace

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(UniformityVerdict v) noexcept {
  switch (v) {
    case UniformityVerdict::locally_uniform: return "locally_uniform";
    case UniformityVerdict::not_uniform: return "not_uniform";
    case UniformityVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(SucpStatus s) noexcept {
  switch (s) {
    case SucpStatus::flat_confirmed: return "flat_confirmed";
    case SucpStatus::curved: return "curved";
    case SucpStatus::curvature_nonvanishing: return "curvature_nonvanishing";
  }
  return "?";
}

const char* to_string(WucpVerdict v) noexcept {
  switch (v) {
    case WucpVerdict::flat_continuation_confirmed: return "flat_continuation_confirmed";
    case WucpVerdict::hypothesis_fails: return "hypothesis_fails";
    case WucpVerdict::continuation_fails: return "continuation_fails";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::vector<MassSample> ball_mass_grid(const MeasureSpec& mu,
                                       const std::vector<Vec>& centers,
                                       const std::vector<double>& radii,
                                       const QuadratureOptions& options) {
  for (double r : radii) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw Error(ErrorKind::precondition, "radii must lie in (0, 1]");
    }
  }
  const long nr = static_cast<long>(radii.size());
  std::vector<MassSample> out(centers.size() * radii.size());
  for_each_index(static_cast<long>(out.size()), options.policy, [&](long i) {
    const Vec& z = centers[i / nr];
    const double r = radii[i % nr];
    const QuadratureResult q = ball_mass(mu, z, r, options);
    out[i] = {z, r, q.scalar(), q.scalar_error(), q.converged, q.evaluations};
  });
  return out;
}

UniformityReport uniformity_from_samples(std::string label, int k,
                                         std::vector<MassSample> samples,
                                         double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::precondition, "tol must be positive");
  UniformityReport rep;
  rep.label = std::move(label);
  rep.k = k;
  rep.tol = tol;
  const double wk = unit_ball_volume(k);
  bool any_fail = false;
  bool any_unconverged = false;
  for (auto& s : samples) {
    const double model = wk * std::pow(s.radius, k);
    UniformityPoint p{s, s.mass / model - 1.0, s.error / model};
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(p.deviation));
    if (!s.converged) {
      any_unconverged = true;
    } else if (std::abs(p.deviation) > tol + p.deviation_error) {
      any_fail = true;
    }
    rep.points.push_back(std::move(p));
  }
  rep.verdict = any_fail          ? UniformityVerdict::not_uniform
                : any_unconverged ? UniformityVerdict::inconclusive
                                  : UniformityVerdict::locally_uniform;
  return rep;
}

UniformityReport check_local_uniform(const MeasureSpec& mu,
                                     const std::vector<Vec>& centers,
                                     const std::vector<double>& radii, double tol,
                                     const QuadratureOptions& options) {
  return uniformity_from_samples(mu.label, mu.k,
                                 ball_mass_grid(mu, centers, radii, options), tol);
}

DistributionReport distribution_from_samples(std::string label,
                                             std::vector<MassSample> samples,
                                             double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::precondition, "tol must be positive");
  DistributionReport rep;
  rep.label = std::move(label);
  rep.tol = tol;
  std::vector<double> radii;
  for (const auto& s : samples) radii.push_back(s.radius);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  bool any_fail = false;
  bool any_unconverged = false;
  for (double r : radii) {
    std::vector<std::size_t> at;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].radius == r) at.push_back(i);
    }
    PairwiseComparison worst{r, at[0], at[0], 0.0, 0.0};
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < at.size(); ++a) {
      const MassSample& si = samples[at[a]];
      if (!si.converged) any_unconverged = true;
      for (std::size_t b = a + 1; b < at.size(); ++b) {
        const MassSample& sj = samples[at[b]];
        const double scale = std::max(std::abs(si.mass), std::abs(sj.mass));
        const double diff = std::abs(si.mass - sj.mass);
        const double allowed = tol * scale + si.error + sj.error;
        if (scale > 0.0) {
          rep.max_relative_difference = std::max(rep.max_relative_difference, diff / scale);
        }
        if (si.converged && sj.converged && diff > allowed) any_fail = true;
        if (diff - allowed > worst_excess) {
          worst_excess = diff - allowed;
          worst = {r, at[a], at[b], diff, allowed};
        }
      }
    }
    rep.worst_pairs.push_back(worst);
  }
  rep.samples = std::move(samples);
  rep.verdict = any_fail          ? Verdict::fail
                : any_unconverged ? Verdict::inconclusive
                                  : Verdict::pass;
  return rep;
}

DistributionReport check_uniformly_distributed(const MeasureSpec& mu,
                                               const std::vector<Vec>& centers,
                                               const std::vector<double>& radii,
                                               double tol,
                                               const QuadratureOptions& options) {
  return distribution_from_samples(mu.label,
                                   ball_mass_grid(mu, centers, radii, options), tol);
}

// ---------------------------------------------------------------------------

DensityLimits density_limits(const RadialMassProfile& profile, int k,
                             double cauchy_tol) {
  const auto& s = profile.samples;
  if (s.size() < 4) {
    throw Error(ErrorKind::precondition, "density limits need at least 4 radii");
  }
  DensityLimits out;
  const double wk = unit_ball_volume(k);
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  for (const auto& x : s) {
    if (!(x.mass > 0.0)) {
      throw Error(ErrorKind::non_convergent, "ball mass must be positive");
    }
    const double model = wk * std::pow(x.radius, k);
    DensitySample d;
    d.radius = x.radius;
    d.mass = x.mass;
    d.K = x.mass / (x.mass + model);
    d.c = x.mass / model;
    d.pairing_residual = std::abs(1.0 / d.c - (1.0 / d.K - 1.0)) * d.c;
    out.samples.push_back(d);
    r_min = std::min(r_min, x.radius);
    r_max = std::max(r_max, x.radius);
  }
  if (r_max < 100.0 * r_min * (1.0 - 1e-12)) {
    throw Error(ErrorKind::precondition, "density limits need radii spanning two decades");
  }
  std::sort(out.samples.begin(), out.samples.end(),
            [](const DensitySample& a, const DensitySample& b) { return a.radius < b.radius; });

  // Neville table in h = r^2, largest radius first so the last rows use the
  // smallest radii.
  const int n = static_cast<int>(out.samples.size());
  const int columns = std::min(3, n - 1);
  auto extrapolate = [&](auto value_of, double& limit, double& spread) {
    std::vector<double> h(n);
    std::vector<std::vector<double>> t(n, std::vector<double>(columns, 0.0));
    for (int i = 0; i < n; ++i) {
      const DensitySample& d = out.samples[n - 1 - i];
      h[i] = d.radius * d.radius;
      t[i][0] = value_of(d);
      for (int j = 1; j < columns && j <= i; ++j) {
        t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) * h[i] / (h[i - j] - h[i]);
      }
    }
    const int j = columns - 1;
    limit = t[n - 1][j];
    spread = std::abs(t[n - 1][j] - t[n - 2][j]);
    if (!(spread <= cauchy_tol * std::max(1.0, std::abs(limit)))) {
      throw Error(ErrorKind::non_convergent,
                  fmt::format("density extrapolants differ by {:.3g}", spread));
    }
  };
  extrapolate([](const DensitySample& d) { return d.c; }, out.c, out.c_spread);
  extrapolate([](const DensitySample& d) { return d.K; }, out.K, out.K_spread);
  out.columns = columns;
  return out;
}

DimensionEstimate dimension_probe(const RadialMassProfile& profile) {
  const auto& s = profile.samples;
  if (s.size() < 4) {
    throw Error(ErrorKind::precondition, "dimension probe needs at least 4 radii");
  }
  const std::size_t n = s.size();
  Mat a(n, 2);
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s[i].mass > 0.0) || !std::isfinite(s[i].mass)) {
      throw Error(ErrorKind::non_convergent, "ball mass must be positive and finite");
    }
    a(i, 0) = std::log(s[i].radius);
    a(i, 1) = 1.0;
    y[i] = std::log(s[i].mass);
  }
  const Vec fit = a.colPivHouseholderQr().solve(y);
  const Vec res = a * fit - y;
  return {fit[0], fit[1], std::sqrt(res.squaredNorm() / n), n};
}

// ---------------------------------------------------------------------------

GraphChart identity_chart(const ManifoldDescriptor& m, const Vec& z) {
  const double safe = safe_chart_radius(m, z);
  return graph_chart_at(m, z, std::min(1.0, safe));
}

IdentityCase elementary_identity_residual(const MeasureSpec& mu, const Vec& z,
                                          double r,
                                          const QuadratureOptions& options) {
  const MomentSet m = moment_set(mu, {z, r}, options);
  IdentityCase c;
  c.center = z;
  c.radius = r;
  c.lhs = m.second_moment;
  c.rhs = uniform_second_moment(mu.k, r);
  c.residual = std::abs(c.lhs - c.rhs);
  c.error = m.second_moment_error;
  c.evaluations = m.evaluations;
  c.converged = m.converged;
  return c;
}

IdentityCase key_equality_residual(const MeasureSpec& mu, const Vec& z, double r,
                                   const QuadratureOptions& options) {
  require_radius(r);
  const GraphChart chart = identity_chart(mu.manifold, z);
  const MomentSet m = moment_set(mu, {z, r}, options);
  const Mat normals = chart.normal_basis();
  const auto hess = second_fundamental_form(chart);

  IdentityCase c;
  c.center = z;
  c.radius = r;
  for (int j = 0; j < chart.codim(); ++j) {
    const Vec n = normals.col(j);
    const double laplacian = hess[j].trace();
    c.lhs += 0.5 * n.dot(m.b_tilde) * laplacian;
    c.rhs += n.dot(m.second_moment_matrix * n);
    c.error += 0.5 * std::abs(laplacian) * projected_error(n, m.b_tilde_error);
    c.error += n.cwiseAbs().dot(m.second_moment_matrix_error * n.cwiseAbs());
  }
  c.residual = std::abs(c.lhs - c.rhs);
  c.evaluations = m.evaluations;
  c.converged = m.converged;
  return c;
}

std::vector<Vec> default_tangent_directions(int k, int random_count,
                                            std::uint64_t seed) {
  std::vector<Vec> out;
  for (int i = 0; i < k; ++i) out.push_back(Vec::Unit(k, i));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < random_count; ++i) {
    Vec v(k);
    do {
      for (int j = 0; j < k; ++j) v[j] = normal(rng);
    } while (v.norm() < 1e-3);
    out.push_back(v.normalized());
  }
  return out;
}

std::vector<IdentityCase> hessian_moment_residual(const MeasureSpec& mu, const Vec& z,
                                           double r,
                                           const std::vector<Vec>& directions,
                                           const QuadratureOptions& options) {
  require_radius(r);
  const GraphChart chart = identity_chart(mu.manifold, z);
  const MomentSet m = moment_set(mu, {z, r}, options);
  const QFormResult q = q_form(m, mu.k, QNormalization::normalized);
  const Mat tangents = chart.tangent_basis();
  const Mat normals = chart.normal_basis();
  const auto hess = second_fundamental_form(chart);

  std::vector<IdentityCase> out;
  for (const Vec& e_chart : directions) {
    if (e_chart.size() != chart.k() || std::abs(e_chart.norm() - 1.0) > 1e-12) {
      throw Error(ErrorKind::precondition, "directions must be unit vectors in R^k");
    }
    const Vec e = tangents * e_chart;
    IdentityCase c;
    c.center = z;
    c.radius = r;
    c.direction = e_chart;
    for (int j = 0; j < chart.codim(); ++j) {
      const Vec n = normals.col(j);
      const double curv = e_chart.dot(hess[j] * e_chart);
      c.lhs += n.dot(m.b) * curv;
      c.error += std::abs(curv) * projected_error(n, m.b_error);
    }
    c.rhs = 1.0 - q.evaluate(e);
    c.error += e.cwiseAbs().dot(q.error * e.cwiseAbs());
    c.residual = std::abs(c.lhs - c.rhs);
    c.evaluations = m.evaluations;
    c.converged = m.converged;
    out.push_back(std::move(c));
  }
  return out;
}

IdentityCase orthogonality_check(const MeasureSpec& mu, const Vec& z, double r,
                                 const QuadratureOptions& options) {
  const GraphChart chart = identity_chart(mu.manifold, z);
  const MomentSet m = moment_set(mu, {z, r}, options);
  const Mat tangents = chart.tangent_basis();
  const Vec tangential = tangents.transpose() * m.b;
  IdentityCase c;
  c.center = z;
  c.radius = r;
  c.lhs = tangential.norm();
  c.rhs = (chart.normal_basis().transpose() * m.b).norm();
  c.residual = c.lhs;
  for (int i = 0; i < chart.k(); ++i) {
    c.error += projected_error(tangents.col(i), m.b_error);
  }
  c.evaluations = m.evaluations;
  c.converged = m.converged;
  return c;
}

std::vector<Vec> default_taylor_probes(const ManifoldDescriptor& m, const Vec& z,
                                       double r) {
  const GraphChart chart = identity_chart(m, z);
  const int k = chart.k();
  std::vector<Vec> dirs;
  for (int i = 0; i < k; ++i) dirs.push_back(Vec::Unit(k, i));
  if (k >= 2) dirs.push_back(Vec::Ones(k).normalized());
  std::vector<Vec> out;
  for (double f : {0.125, 0.1875, 0.25, 0.3125, 0.375}) {
    const double t = f * r;
    if (t >= chart.domain_radius()) continue;
    for (const Vec& d : dirs) out.push_back(chart.to_ambient(t * d));
  }
  return out;
}

TaylorBoundReport taylor_bound_check(const MeasureSpec& mu, const Vec& z, double r,
                                     const std::vector<Vec>& probe_points,
                                     const QuadratureOptions& options) {
  require_radius(r);
  if (probe_points.size() < 2) {
    throw Error(ErrorKind::precondition, "Taylor bound check needs at least two probes");
  }
  for (const Vec& x : probe_points) {
    const double d = (x - z).norm();
    if (!(d > 0.0) || d >= 0.5 * r) {
      throw Error(ErrorKind::precondition, "probe points must lie in B(z, r/2) minus z");
    }
    if (!mu.manifold.contains(x)) {
      throw Error(ErrorKind::point_off_manifold, "probe point is off the support");
    }
  }
  const MomentSet m = moment_set(mu, {z, r}, options);
  const QFormResult q = q_form(m, mu.k, QNormalization::normalized);
  TaylorBoundReport rep;
  rep.center = z;
  rep.radius = r;
  rep.evaluations = m.evaluations;
  for (const Vec& x : probe_points) {
    const Vec d = x - z;
    const double dist = d.norm();
    TaylorProbe p;
    p.point = x;
    p.distance = dist;
    p.lhs = std::abs(2.0 * m.b.dot(d) + q.evaluate(d) - d.squaredNorm());
    p.ratio = p.lhs * r / (dist * dist * dist);
    rep.probes.push_back(std::move(p));
  }
  std::stable_sort(rep.probes.begin(), rep.probes.end(),
                   [](const TaylorProbe& a, const TaylorProbe& b) {
                     return a.distance < b.distance;
                   });
  const std::size_t half = rep.probes.size() / 2;
  for (std::size_t i = 0; i < rep.probes.size(); ++i) {
    const double ratio = rep.probes[i].ratio;
    rep.empirical_constant = std::max(rep.empirical_constant, ratio);
    double& bucket = i < half ? rep.fine_max : rep.coarse_max;
    bucket = std::max(bucket, ratio);
  }
  rep.stable = std::isfinite(rep.empirical_constant) &&
               rep.fine_max <= 1.2 * rep.coarse_max + 1e-9;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct PlaneDistance {
  double mass = 0.0;
  double moment = 0.0;
  double error = 0.0;
};

// int dist(y, P)^2 dmu over B(z, r) for the plane through `origin` with the
// given orthonormal normals.
PlaneDistance plane_distance_moment(const MeasureSpec& mu, const Vec& z, double r,
                                    const Vec& origin, const Mat& normals,
                                    const QuadratureOptions& options) {
  BallIntegrand f;
  f.output_dim = 2;
  f.component_scale = {1.0, r * r};
  f.eval = [origin, normals](const Vec& y, std::span<double> out) {
    out[0] = 1.0;
    out[1] = (normals.transpose() * (y - origin)).squaredNorm();
  };
  const QuadratureResult q = integrate_over_ball(mu.manifold, {z, r}, f, options);
  return {mu.c * q.value[0], mu.c * q.value[1], mu.c * q.error[1]};
}

}  // namespace

SucpReport sucp_probe(const MeasureSpec& mu, const std::vector<Vec>& scan_points,
                      const SucpOptions& options) {
  if (options.chain_length < 1 || !(options.chain_step > 0.0 && options.chain_step < 0.5)) {
    throw Error(ErrorKind::precondition, "chain needs length >= 1 and step in (0, 1/2)");
  }
  for (double r : options.radii) require_radius(r);

  SucpReport rep;
  rep.label = mu.label;
  rep.min_norm_H = std::numeric_limits<double>::infinity();
  rep.points.resize(scan_points.size());
  // Points run concurrently; quadrature inside stays serial.
  QuadratureOptions inner = options.quadrature;
  const ExecPolicy policy = inner.policy;
  inner.policy = ExecPolicy::serial;

  for_each_index(static_cast<long>(scan_points.size()), policy, [&](long i) {
    SucpPoint& out = rep.points[i];
    const Vec& z0 = scan_points[i];
    const CurvatureReport cr = curvature_at(mu.manifold, z0);
    out.point = z0;
    out.norm_H = cr.norm_H;
    if (cr.norm_H > options.h_tol) {
      out.status = SucpStatus::curvature_nonvanishing;
      return;
    }
    const GraphChart chart = identity_chart(mu.manifold, z0);
    const Mat normals = chart.normal_basis();
    const Vec step = options.chain_step * chart.tangent_basis().col(0);
    bool flat = true;
    Vec z = z0;
    for (int link = 0; link < options.chain_length && flat; ++link) {
      if (link > 0) {
        z = mu.manifold.project(z + step);
      }
      const double h = link == 0 ? cr.norm_H : curvature_at(mu.manifold, z).norm_H;
      for (double r : options.radii) {
        const PlaneDistance d = plane_distance_moment(mu, z, r, z0, normals, inner);
        ChainLink l{z, h, r, d.mass, d.moment, d.error, false};
        l.flat = h <= options.h_tol && d.moment <= options.flat_tol * d.mass;
        flat = flat && l.flat;
        out.chain.push_back(std::move(l));
      }
    }
    out.status = flat ? SucpStatus::flat_confirmed : SucpStatus::curved;
  });
  for (const auto& p : rep.points) rep.min_norm_H = std::min(rep.min_norm_H, p.norm_H);
  if (rep.points.empty()) rep.min_norm_H = kNaN;
  return rep;
}

WucpReport wucp_probe(const MeasureSpec& mu, const Vec& z0, double r0,
                      const WucpOptions& options) {
  if (!mu.manifold.contains(z0)) {
    throw Error(ErrorKind::point_off_manifold, "z0 is off the support");
  }
  if (!(r0 > 0.0)) throw Error(ErrorKind::precondition, "r0 must be positive");
  const int n1 = mu.manifold.ambient_dim();
  const int k = options.k_guess > 0 ? options.k_guess : mu.k;
  if (k >= n1) throw Error(ErrorKind::precondition, "plane dimension must be below n+1");

  WucpReport rep;
  rep.label = mu.label;
  rep.z0 = z0;
  rep.r0 = r0;
  rep.k_guess = k;

  // Best-fit k-plane through z0: the smallest n+1-k eigenvalues of the
  // second-moment matrix carry the squared distance to it.
  const MomentSet m = moment_set(mu, {z0, r0}, options.quadrature);
  Eigen::SelfAdjointEigenSolver<Mat> eig(m.second_moment_matrix);
  rep.patch_mass = m.mass;
  rep.normal_moment = eig.eigenvalues().head(n1 - k).sum();
  rep.hypothesis_holds = rep.normal_moment <= options.tol * m.mass;
  if (!rep.hypothesis_holds) {
    rep.verdict = WucpVerdict::hypothesis_fails;
    return rep;
  }

  // Densities from balls well inside the flat patch.
  std::vector<double> radii;
  const double top = std::min(1.0, 0.25 * r0);
  for (int i = options.profile_radii - 1; i >= 0; --i) radii.push_back(std::ldexp(top, -i));
  const RadialMassProfile profile = radial_profile(mu, z0, radii, options.quadrature);
  MeasureSpec shifted = mu;
  shifted.k = k;
  rep.density = density_limits(profile, k, options.cauchy_tol);

  const MeasureSpec rescaled = rescale(shifted, r0, rep.density->c);
  const Vec z_scaled = (4.0 / r0) * z0;
  std::vector<Vec> centers = {z_scaled};
  for (const Vec& c : default_centers(rescaled)) centers.push_back(c);
  rep.rescaled_uniformity = check_local_uniform(rescaled, centers, {0.25, 0.5, 1.0},
                                                options.uniformity_tol,
                                                options.quadrature);
  rep.rescaled_sucp = sucp_probe(rescaled, {z_scaled}, options.sucp);

  const bool uniform =
      rep.rescaled_uniformity->verdict == UniformityVerdict::locally_uniform;
  const bool flat = !rep.rescaled_sucp->points.empty() &&
                    rep.rescaled_sucp->points[0].status == SucpStatus::flat_confirmed;
  rep.verdict = uniform && flat ? WucpVerdict::flat_continuation_confirmed
                                : WucpVerdict::continuation_fails;
  return rep;
}

}  // namespace gmtlab
