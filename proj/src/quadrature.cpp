#include "gmtlab/quadrature.hpp"

#include "gmtlab/cubature.hpp"
#include "gmtlab/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

namespace gmtlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOnSupportTol = 1e-10;

// Unit vector in R^k from k - 1 hyperspherical angles; returns the Jacobian of
// the angle map onto S^{k-1}.
double sphere_direction(int k, std::span<const double> angles, Vec& omega) {
  omega.resize(k);
  double sin_product = 1.0;
  double jacobian = 1.0;
  const int m = k - 1;
  for (int i = 0; i < m; ++i) {
    omega[i] = sin_product * std::cos(angles[i]);
    if (i + 1 < m) jacobian *= std::pow(std::sin(angles[i]), m - 1 - i);
    sin_product *= std::sin(angles[i]);
  }
  omega[m] = sin_product;
  return jacobian;
}

Interval angle_limits(int k, int level) {
  return {0.0, level == k - 2 ? 2.0 * kPi : kPi};
}

QuadratureResult to_result(CubatureResult&& r) {
  QuadratureResult out;
  out.value = Eigen::Map<const Vec>(r.value.data(), static_cast<Eigen::Index>(r.value.size()));
  out.error = Eigen::Map<const Vec>(r.error.data(), static_cast<Eigen::Index>(r.error.size()));
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  out.method = QuadratureMethod::adaptive_cubature;
  return out;
}

void accumulate(QuadratureResult& total, const QuadratureResult& part) {
  if (total.value.size() == 0) {
    total = part;
    return;
  }
  total.value += part.value;
  total.error += part.error;
  total.evaluations += part.evaluations;
  total.converged = total.converged && part.converged;
}

CubatureOptions cubature_options(const QuadratureOptions& o) {
  CubatureOptions c;
  c.rel_tol = o.rel_tol;
  c.abs_tol = o.abs_tol;
  c.max_intervals = o.max_intervals;
  c.policy = o.policy;
  return c;
}

using RadialLimits = std::function<Interval(const Vec& omega)>;
// Ambient point and weight (without the angular Jacobian) at radius t.
using RadialMap = std::function<void(const Vec& omega, double t, Vec& point,
                                     double& weight)>;

// int_{S^{k-1}} int_{limits(omega)} f(map(omega, t)) weight dt d(omega).
QuadratureResult integrate_polar(int k, const RadialLimits& limits,
                                 const RadialMap& map, const BallIntegrand& f,
                                 const QuadratureOptions& options) {
  const int dim = f.output_dim;
  auto weighted = [&f, dim](const Vec& point, double weight,
                            std::span<double> out) {
    f.eval(point, out);
    for (int c = 0; c < dim; ++c) out[c] *= weight;
  };
  QuadratureResult total;
  if (k == 1) {
    for (double sign : {1.0, -1.0}) {
      const Vec omega = Vec::Constant(1, sign);
      NestedProblem p;
      p.dims = 1;
      p.output_dim = dim;
      p.component_scale = f.component_scale;
      p.limits = [&](int, std::span<const double>) { return limits(omega); };
      p.integrand = [&](std::span<const double> x, std::span<double> out) {
        Vec point;
        double weight = 0.0;
        map(omega, x[0], point, weight);
        weighted(point, weight, out);
      };
      accumulate(total, to_result(integrate_nested(p, cubature_options(options))));
    }
    return total;
  }
  NestedProblem p;
  p.dims = k;
  p.output_dim = dim;
  p.component_scale = f.component_scale;
  p.limits = [&](int level, std::span<const double> outer) {
    if (level < k - 1) return angle_limits(k, level);
    Vec omega;
    sphere_direction(k, outer, omega);
    return limits(omega);
  };
  p.integrand = [&](std::span<const double> x, std::span<double> out) {
    Vec omega;
    const double jac = sphere_direction(k, x.first(k - 1), omega);
    Vec point;
    double weight = 0.0;
    map(omega, x[k - 1], point, weight);
    weighted(point, jac * weight, out);
  };
  return to_result(integrate_nested(p, cubature_options(options)));
}

void check_ball(const ManifoldDescriptor& m, const BallRegion& region) {
  if (!(region.radius > 0.0) || !std::isfinite(region.radius)) {
    throw Error(ErrorKind::precondition, "ball radius must be positive");
  }
  if (region.center.size() != m.ambient_dim()) {
    throw Error(ErrorKind::precondition, "ball centre has wrong dimension");
  }
  const double distance = (region.center - m.project(region.center)).norm();
  if (distance > region.radius) {
    throw Error(ErrorKind::empty_intersection,
                fmt::format("ball of radius {} misses {}", region.radius,
                            m.describe()));
  }
  if (distance > kOnSupportTol) {
    throw Error(ErrorKind::point_off_manifold,
                "ball integrals are taken around support points");
  }
}

void check_tolerance(const QuadratureOptions& options) {
  if (!(options.rel_tol >= 1e-12)) {
    throw Error(ErrorKind::precondition, "rel_tol must be at least 1e-12");
  }
}

QuadratureResult plane_ball(const ManifoldDescriptor& m, const BallRegion& region,
                            const BallIntegrand& f,
                            const QuadratureOptions& options) {
  const int k = m.k();
  const Vec base = m.to_canonical(m.project(region.center));
  const double r = region.radius;
  return integrate_polar(
      k, [r](const Vec&) { return Interval{0.0, r}; },
      [&m, &base, k](const Vec& omega, double t, Vec& point, double& weight) {
        Vec c = base;
        c.head(k) += t * omega;
        point = m.to_ambient(c);
        weight = std::pow(t, k - 1);
      },
      f, options);
}

QuadratureResult sphere_ball(const ManifoldDescriptor& m,
                             const BallRegion& region, const BallIntegrand& f,
                             const QuadratureOptions& options) {
  const int k = m.k();
  const double rho = m.rho();
  const Vec base = m.to_canonical(m.project(region.center));
  const Vec nu = base.head(k + 1) / rho;
  const Mat tangent = orthonormal_complement(Mat(nu), 0);
  const double r = region.radius;
  const double theta_max = r >= 2.0 * rho ? kPi : 2.0 * std::asin(r / (2.0 * rho));
  return integrate_polar(
      k, [theta_max](const Vec&) { return Interval{0.0, theta_max}; },
      [&m, &nu, &tangent, rho, k](const Vec& omega, double theta, Vec& point,
                                  double& weight) {
        Vec c = Vec::Zero(m.ambient_dim());
        c.head(k + 1) =
            rho * (std::cos(theta) * nu + std::sin(theta) * (tangent * omega));
        point = m.to_ambient(c);
        weight = std::pow(rho, k) * std::pow(std::sin(theta), k - 1);
      },
      f, options);
}

PolarPatch graph_patch(const ManifoldDescriptor& m, const Vec& center) {
  const int k = m.k();
  const Vec base = m.to_canonical(m.project(center)).head(k);
  PolarPatch patch;
  patch.k = k;
  patch.max_radius = std::numeric_limits<double>::infinity();
  patch.center = m.project(center);
  patch.point = [m, base, k](const Vec& u) {
    Vec c(m.ambient_dim());
    c.head(k) = base + u;
    c.tail(m.codim()) = m.graph_value(base + u);
    return m.to_ambient(c);
  };
  patch.jacobian = [m, base, k](const Vec& u) {
    const Mat g = m.graph_gradient(base + u);
    return std::sqrt((Mat::Identity(k, k) + g.transpose() * g).determinant());
  };
  return patch;
}

// First radius t in (0, t_hi] with |point(t omega) - centre| = r.
double radial_limit(const PolarPatch& patch, const Vec& omega, double r) {
  const double t_hi =
      std::min(r, patch.max_radius * (1.0 - 1e-12));
  auto gap = [&](double t) {
    return (patch.point(t * omega) - patch.center).norm() - r;
  };
  const double g_hi = gap(t_hi);
  if (g_hi < 0.0) {
    throw Error(ErrorKind::chart_radius_unavailable,
                "ball is not contained in the chart domain");
  }
  if (g_hi == 0.0) return t_hi;
  constexpr int kScan = 32;
  double lo = 0.0;
  double g_lo = -r;
  for (int i = 1; i <= kScan; ++i) {
    const double t = t_hi * i / kScan;
    const double g = i == kScan ? g_hi : gap(t);
    if (g >= 0.0) {
      if (g == 0.0) return t;
      std::uintmax_t iterations = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          gap, lo, t, g_lo, g, boost::math::tools::eps_tolerance<double>(52),
          iterations);
      return 0.5 * (bracket.first + bracket.second);
    }
    lo = t;
    g_lo = g;
  }
  return t_hi;
}

Interval cone_radial(double p, double c0, bool capped, double a, double gamma,
                     double gamma_max) {
  if (!capped) {
    const double root = std::sqrt(std::max(p * p - 4.0 * c0, 0.0));
    return {std::max(0.0, 0.5 * (p - root)), 0.5 * (p + root)};
  }
  // p^2 - 4 c0 = (p - 2 sqrt(c0)) (p + 2 sqrt(c0)) with the first factor
  // written as a difference of cosines to keep it accurate near gamma_max.
  const double near = 2.0 * a * std::sin(0.5 * (gamma + gamma_max)) *
                      std::sin(0.5 * (gamma_max - gamma));
  const double disc = std::max(near, 0.0) * (p + 2.0 * std::sqrt(c0));
  const double root = std::sqrt(disc);
  return {std::max(0.0, 0.5 * (p - root)), 0.5 * (p + root)};
}

}  // namespace

const char* to_string(QuadratureMethod method) noexcept {
  switch (method) {
    case QuadratureMethod::adaptive_cubature:
      return "adaptive_cubature";
    case QuadratureMethod::monte_carlo:
      return "monte_carlo";
    case QuadratureMethod::closed_form:
      return "closed_form";
  }
  return "unknown";
}

BallIntegrand scalar_integrand(std::function<double(const Vec&)> f) {
  BallIntegrand out;
  out.output_dim = 1;
  out.eval = [f = std::move(f)](const Vec& y, std::span<double> v) { v[0] = f(y); };
  return out;
}

PolarPatch polar_patch(const GraphChart& chart) {
  PolarPatch patch;
  patch.k = chart.k();
  patch.max_radius = chart.domain_radius();
  patch.center = chart.origin();
  patch.point = [chart](const Vec& u) { return chart.to_ambient(u); };
  patch.jacobian = [chart](const Vec& u) { return area_element(chart, u); };
  return patch;
}

QuadratureResult integrate_over_patch_ball(const PolarPatch& patch,
                                           double radius,
                                           const BallIntegrand& f,
                                           const QuadratureOptions& options) {
  check_tolerance(options);
  if (!(radius > 0.0)) {
    throw Error(ErrorKind::precondition, "ball radius must be positive");
  }
  const int k = patch.k;
  return integrate_polar(
      k,
      [&patch, radius](const Vec& omega) {
        return Interval{0.0, radial_limit(patch, omega, radius)};
      },
      [&patch, k](const Vec& omega, double t, Vec& point, double& weight) {
        const Vec u = t * omega;
        point = patch.point(u);
        weight = patch.jacobian(u) * std::pow(t, k - 1);
      },
      f, options);
}

QuadratureResult integrate_cone_ball(const ManifoldDescriptor& cone,
                                     const BallRegion& region,
                                     const BallIntegrand& f,
                                     const QuadratureOptions& options) {
  if (cone.kind() != ManifoldKind::kp_cone) {
    throw Error(ErrorKind::precondition, "integrate_cone_ball needs the cone");
  }
  check_tolerance(options);
  check_ball(cone, region);
  const Vec base = cone.to_canonical(cone.project(region.center));
  const double a = base.head(3).norm();
  const double r = region.radius;
  const double z_sign = base[3] < 0.0 ? -1.0 : 1.0;
  const Vec nu = a > 0.0 ? Vec(base.head(3) / a) : Vec(Vec::Unit(3, 0));
  const Mat across = orthonormal_complement(Mat(nu), 0);
  // Ball condition on a nappe: s^2 - p(gamma) s + c0 <= 0.
  const double c0 = a * a - 0.5 * r * r;
  const bool capped = c0 > 0.0;
  const double gamma_max =
      capped ? std::acos(std::clamp(2.0 * std::sqrt(c0) / a - 1.0, -1.0, 1.0))
             : kPi;
  const int dim = f.output_dim;

  QuadratureResult total;
  for (const bool same_nappe : {true, false}) {
    if (capped && !same_nappe) continue;
    const double nappe = same_nappe ? z_sign : -z_sign;
    const double p_shift = same_nappe ? 1.0 : -1.0;
    NestedProblem problem;
    problem.dims = 3;
    problem.output_dim = dim;
    problem.component_scale = f.component_scale;
    // Capped balls use gamma = gamma_max - w^2 so the square-root edge of the
    // radial interval becomes smooth in w.
    auto gamma_of = [capped, gamma_max](double x) {
      return capped ? gamma_max - x * x : x;
    };
    problem.limits = [&, gamma_of](int level, std::span<const double> outer) {
      if (level == 0) return Interval{0.0, 2.0 * kPi};
      if (level == 1) {
        return capped ? Interval{0.0, std::sqrt(gamma_max)} : Interval{0.0, kPi};
      }
      const double gamma = gamma_of(outer[1]);
      const double p = a * (std::cos(gamma) + p_shift);
      return cone_radial(p, c0, capped, a, gamma, gamma_max);
    };
    problem.integrand = [&, gamma_of](std::span<const double> x,
                                      std::span<double> out) {
      const double beta = x[0];
      const double gamma = gamma_of(x[1]);
      const double s = x[2];
      const Vec omega =
          std::cos(gamma) * nu +
          std::sin(gamma) * (std::cos(beta) * across.col(0) +
                             std::sin(beta) * across.col(1));
      Vec c(4);
      c.head(3) = s * omega;
      c[3] = nappe * s;
      f.eval(cone.to_ambient(c), out);
      double weight = std::sqrt(2.0) * s * s * std::sin(gamma);
      if (capped) weight *= 2.0 * x[1];
      for (int i = 0; i < dim; ++i) out[i] *= weight;
    };
    CubatureOptions copt = cubature_options(options);
    if (!same_nappe) {
      // The far nappe can contribute almost nothing (vertex near the sphere
      // of radius r); judge it against the near-nappe total instead.
      double scaled = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double s = f.component_scale.empty() ? 1.0 : f.component_scale[i];
        scaled = std::max(scaled, std::abs(total.value[i]) / s);
      }
      copt.abs_tol = std::max(copt.abs_tol, options.rel_tol * scaled);
    }
    accumulate(total, to_result(integrate_nested(problem, copt)));
  }
  return total;
}

QuadratureResult integrate_cone_ball(const BallRegion& region,
                                     const BallIntegrand& f,
                                     const QuadratureOptions& options) {
  return integrate_cone_ball(ManifoldDescriptor::kp_cone(), region, f, options);
}

QuadratureResult integrate_over_ball(const ManifoldDescriptor& m,
                                     const BallRegion& region,
                                     const BallIntegrand& f,
                                     const QuadratureOptions& options) {
  check_tolerance(options);
  check_ball(m, region);
  switch (m.kind()) {
    case ManifoldKind::plane:
      return plane_ball(m, region, f, options);
    case ManifoldKind::sphere:
      return sphere_ball(m, region, f, options);
    case ManifoldKind::kp_cone:
      return integrate_cone_ball(m, region, f, options);
    case ManifoldKind::polynomial_graph:
      return integrate_over_patch_ball(graph_patch(m, region.center),
                                       region.radius, f, options);
  }
  throw Error(ErrorKind::precondition, "unsupported manifold kind");
}

namespace {

// Maps a point of the unit cube to an ambient point and a sampling weight
// (Jacobian times box volume).
using UnitSampler =
    std::function<void(std::span<const double> unit, Vec& point, double& weight)>;

struct SamplerSpec {
  int dims = 0;
  UnitSampler map;
};

SamplerSpec make_sampler(const ManifoldDescriptor& m, const BallRegion& region) {
  const int k = m.k();
  const double r = region.radius;
  const Vec base = m.to_canonical(m.project(region.center));
  switch (m.kind()) {
    case ManifoldKind::plane:
      return {k, [m, base, r, k](std::span<const double> u, Vec& point,
                                 double& weight) {
                Vec c = base;
                for (int i = 0; i < k; ++i) c[i] += (2.0 * u[i] - 1.0) * r;
                point = m.to_ambient(c);
                weight = std::pow(2.0 * r, k);
              }};
    case ManifoldKind::polynomial_graph:
      return {k, [m, base, r, k](std::span<const double> u, Vec& point,
                                 double& weight) {
                Vec v = base.head(k);
                for (int i = 0; i < k; ++i) v[i] += (2.0 * u[i] - 1.0) * r;
                Vec c(m.ambient_dim());
                c.head(k) = v;
                c.tail(m.codim()) = m.graph_value(v);
                point = m.to_ambient(c);
                const Mat g = m.graph_gradient(v);
                weight = std::pow(2.0 * r, k) *
                         std::sqrt((Mat::Identity(k, k) + g.transpose() * g)
                                       .determinant());
              }};
    case ManifoldKind::sphere: {
      const double rho = m.rho();
      const Vec nu = base.head(k + 1) / rho;
      const Mat tangent = orthonormal_complement(Mat(nu), 0);
      const double theta_max =
          r >= 2.0 * rho ? kPi : 2.0 * std::asin(r / (2.0 * rho));
      const double theta_box = std::min(kPi, 1.25 * theta_max);
      // k = 1 uses the extra coordinate to pick one of the two directions.
      const int dims = k == 1 ? 2 : k;
      return {dims, [m, nu, tangent, rho, k, theta_box](
                        std::span<const double> u, Vec& point, double& weight) {
                const double theta = u[0] * theta_box;
                Vec omega;
                double box = theta_box;
                double jac = 1.0;
                if (k == 1) {
                  omega = Vec::Constant(1, u[1] < 0.5 ? 1.0 : -1.0);
                  box *= 2.0;
                } else {
                  std::vector<double> angles(k - 1);
                  for (int i = 0; i < k - 1; ++i) {
                    const double span = angle_limits(k, i).hi;
                    angles[i] = u[i + 1] * span;
                    box *= span;
                  }
                  jac = sphere_direction(k, angles, omega);
                }
                Vec c = Vec::Zero(m.ambient_dim());
                c.head(k + 1) = rho * (std::cos(theta) * nu +
                                       std::sin(theta) * (tangent * omega));
                point = m.to_ambient(c);
                weight = box * jac * std::pow(rho, k) *
                         std::pow(std::sin(theta), k - 1);
              }};
    }
    case ManifoldKind::kp_cone: {
      const double a = base.head(3).norm();
      const double z_norm = std::sqrt(2.0) * a;
      const double z_sign = base[3] < 0.0 ? -1.0 : 1.0;
      const Vec nu = a > 0.0 ? Vec(base.head(3) / a) : Vec(Vec::Unit(3, 0));
      const Mat across = orthonormal_complement(Mat(nu), 0);
      const bool separated = r < z_norm;
      double s_lo = 0.0;
      const double s_hi = (z_norm + r) / std::sqrt(2.0);
      double cos_lo = -1.0;
      if (separated) {
        // Points of the ball see the centre under an angle at most
        // asin(r / |z|); on the same nappe cos(angle) = (1 + cos gamma) / 2.
        s_lo = (z_norm - r) / std::sqrt(2.0);
        const double cos_angle = std::sqrt(1.0 - (r / z_norm) * (r / z_norm));
        cos_lo = std::max(-1.0, 2.0 * cos_angle - 1.0);
      }
      return {4, [m, nu, across, z_sign, separated, s_lo, s_hi, cos_lo](
                     std::span<const double> u, Vec& point, double& weight) {
                const double s = s_lo + u[0] * (s_hi - s_lo);
                const double cos_gamma = cos_lo + u[1] * (1.0 - cos_lo);
                const double sin_gamma =
                    std::sqrt(std::max(0.0, 1.0 - cos_gamma * cos_gamma));
                const double beta = 2.0 * kPi * u[2];
                double nappe = z_sign;
                double box = (s_hi - s_lo) * (1.0 - cos_lo) * 2.0 * kPi;
                if (!separated) {
                  nappe = u[3] < 0.5 ? z_sign : -z_sign;
                  box *= 2.0;
                }
                const Vec omega =
                    cos_gamma * nu + sin_gamma * (std::cos(beta) * across.col(0) +
                                                  std::sin(beta) * across.col(1));
                Vec c(4);
                c.head(3) = s * omega;
                c[3] = nappe * s;
                point = m.to_ambient(c);
                weight = box * std::sqrt(2.0) * s * s;
              }};
    }
  }
  throw Error(ErrorKind::precondition, "unsupported manifold kind");
}

struct BlockSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

constexpr std::size_t kBlockSize = 8192;

// splitmix64 finaliser, used only to derive independent per-block seeds.
std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

QuadratureResult monte_carlo_fallback(const ManifoldDescriptor& m,
                                      const BallRegion& region,
                                      const BallIntegrand& f,
                                      std::size_t samples, std::uint64_t seed,
                                      ExecPolicy policy) {
  if (samples < 1000) {
    throw Error(ErrorKind::precondition, "Monte Carlo needs at least 1e3 samples");
  }
  check_ball(m, region);
  const SamplerSpec sampler = make_sampler(m, region);
  const int dim = f.output_dim;
  const Vec center = region.center;
  const double r2 = region.radius * region.radius;
  const std::size_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> partial(blocks);

  auto run_block = [&](std::size_t b) {
    BlockSums sums{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    std::mt19937_64 gen(mix_seed(seed ^ mix_seed(b)));
    std::vector<double> unit(sampler.dims);
    std::vector<double> value(dim);
    Vec point;
    double weight = 0.0;
    const std::size_t first = b * kBlockSize;
    const std::size_t last = std::min(samples, first + kBlockSize);
    for (std::size_t i = first; i < last; ++i) {
      // Stratified along the first coordinate, uniform in the others.
      unit[0] = (static_cast<double>(i) + unit_double(gen)) /
                static_cast<double>(samples);
      for (int d = 1; d < sampler.dims; ++d) unit[d] = unit_double(gen);
      sampler.map(unit, point, weight);
      if ((point - center).squaredNorm() > r2 || weight == 0.0) continue;
      f.eval(point, value);
      for (int c = 0; c < dim; ++c) {
        const double g = value[c] * weight;
        sums.sum[c] += g;
        sums.sum_sq[c] += g * g;
      }
    }
    partial[b] = std::move(sums);
  };

  const long block_count = static_cast<long>(blocks);
  for_each_index(block_count, policy,
                 [&](long b) { run_block(static_cast<std::size_t>(b)); });

  QuadratureResult out;
  out.method = QuadratureMethod::monte_carlo;
  out.seed = seed;
  out.evaluations = samples;
  out.value = Vec::Zero(dim);
  out.error = Vec::Zero(dim);
  const double n = static_cast<double>(samples);
  for (int c = 0; c < dim; ++c) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& p : partial) {
      sum += p.sum[c];
      sum_sq += p.sum_sq[c];
    }
    const double mean = sum / n;
    const double variance = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
    out.value[c] = mean;
    out.error[c] = std::sqrt(variance / n);
  }
  return out;
}

}  // namespace gmtlab
