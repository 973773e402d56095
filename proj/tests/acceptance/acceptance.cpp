// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Tolerances are fixed here and must not be relaxed to make a run pass.

#include "gmtlab/errors.hpp"
#include "gmtlab/geometry.hpp"
#include "gmtlab/measure.hpp"
#include "gmtlab/moments.hpp"
#include "gmtlab/report.hpp"
#include "gmtlab/verification.hpp"
#include "../oracles.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace gmtlab;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

QuadratureOptions quad() {
  QuadratureOptions o;
  o.rel_tol = 1e-11;
  return o;
}

bool singular(const MeasureSpec& mu, const Vec& z) {
  for (const auto& s : mu.manifold.singular_points())
    if ((s - z).norm() < 1e-12) return true;
  return false;
}

const std::vector<std::string> kUniform = {"plane", "sphere:2:0.5", "sphere:2:1",
                                           "sphere:2:2", "kp_cone"};
const std::vector<double> kIdentityRadii = {0.1, 0.25, 0.4};

Outcome ac1() {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  double worst = 0.0;
  for (const auto& label : kUniform) {
    const MeasureSpec mu = builtin(label);
    std::vector<double> radii;
    for (double r : {0.05, 0.1, 0.25, 0.5, 0.75, 1.0})
      if (mu.manifold.kind() != ManifoldKind::sphere || r <= 2 * mu.manifold.rho())
        radii.push_back(r);
    auto centers = default_centers(mu);
    if (label == "kp_cone" && !singular(mu, centers.front())) out.ok = false;
    const auto rep = check_local_uniform(mu, centers, radii, 1e-6, quad());
    worst = std::max(worst, rep.max_abs_deviation);
    if (rep.verdict != UniformityVerdict::locally_uniform || rep.max_abs_deviation > 1e-6)
      out.ok = false;
  }
  const MeasureSpec s3 = builtin("s3_in_r4");
  const auto rep = check_local_uniform(s3, default_centers(s3), {0.5, 1.0}, 1e-6, quad());
  double dev_r1 = 0.0;
  for (const auto& p : rep.points)
    if (p.sample.radius == 1.0) {
      dev_r1 = p.deviation;
      if (std::abs(p.deviation - (-0.0788)) > 1e-3) out.ok = false;
    }
  if (rep.verdict != UniformityVerdict::not_uniform) out.ok = false;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 300) out.ok = false;
  out.detail = fmt::format("max uniform deviation {:.2e}, S3 deviation at r=1 {:.6f}, {:.1f}s",
                           worst, dev_r1, secs);
  return out;
}

Outcome ac2() {
  Outcome out;
  double worst = 0.0;
  for (const auto& label : kUniform) {
    const MeasureSpec mu = builtin(label);
    for (const auto& z : default_centers(mu))
      for (double r : kIdentityRadii) {
        const MomentSet m = moment_set(mu, {z, r}, quad());
        const double rel = std::abs(m.second_moment - oracle::uniform_second_moment(mu.k, r)) /
                           std::pow(r, mu.k + 2);
        worst = std::max(worst, rel);
        if (!(rel <= 1e-7)) out.ok = false;
      }
  }
  out.detail = fmt::format("max residual / r^(k+2) {:.2e} (vertex included)", worst);
  return out;
}

Outcome ac3() {
  Outcome out;
  double closed = 0.0, smooth = 0.0, cone = 0.0;
  for (const auto& label : {"plane", "sphere:2:0.5", "sphere:2:1", "sphere:2:2", "kp_cone"}) {
    const MeasureSpec mu = builtin(label);
    const bool is_cone = mu.manifold.kind() == ManifoldKind::kp_cone;
    for (const auto& z : default_centers(mu)) {
      if (singular(mu, z)) continue;
      for (double r : kIdentityRadii) {
        const IdentityCase c = key_equality_residual(mu, z, r, quad());
        if (is_cone) {
          cone = std::max(cone, c.residual);
          if (!(c.residual <= 1e-5)) out.ok = false;
        } else {
          smooth = std::max(smooth, c.residual);
          if (!(c.residual <= 1e-7)) out.ok = false;
        }
        if (std::string(label) == "sphere:2:1") {
          const double e = oracle::s2_b_tilde(r);
          closed = std::max({closed, std::abs(c.lhs - e), std::abs(c.rhs - e)});
          if (std::abs(c.lhs - e) > 1e-7 || std::abs(c.rhs - e) > 1e-7) out.ok = false;
        }
      }
    }
  }
  out.detail = fmt::format("plane/sphere {:.2e}, unit sphere vs pi r^6/12 {:.2e}, cone {:.2e}",
                           smooth, closed, cone);
  return out;
}

Outcome ac4() {
  Outcome out;
  const MeasureSpec mu = builtin("sphere:2:1");
  const auto dirs = default_tangent_directions(2, 10, kDefaultSeed);
  double worst = 0.0, exact = 0.0;
  std::size_t count = 0;
  for (const auto& z : default_centers(mu))
    for (double r : kIdentityRadii) {
      const QFormResult q = q_form(mu, {z, r}, QNormalization::normalized, quad());
      const GraphChart chart = identity_chart(mu.manifold, z);
      for (const auto& c : hessian_moment_residual(mu, z, r, dirs, quad())) {
        ++count;
        worst = std::max(worst, c.residual);
        const double qe = q.evaluate(chart.tangent_basis() * c.direction);
        exact = std::max({exact, std::abs(c.lhs - oracle::s2_b(r)),
                          std::abs(qe - oracle::s2_q_tangent(r))});
        if (!(c.residual <= 1e-7)) out.ok = false;
      }
    }
  if (exact > 1e-7 || dirs.size() < 12) out.ok = false;
  out.detail = fmt::format("{} cases, {} random directions, max residual {:.2e}, "
                           "vs r^2/6 and 1-r^2/6 {:.2e}",
                           count, dirs.size() - 2, worst, exact);
  return out;
}

Outcome ac5() {
  Outcome out;
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& label : kUniform) {
    const MeasureSpec mu = builtin(label);
    for (const auto& z : default_centers(mu)) {
      if (singular(mu, z)) continue;
      for (double r : kIdentityRadii) {
        const IdentityCase c = orthogonality_check(mu, z, r, quad());
        const double b = std::hypot(c.lhs, c.rhs);
        const double rel = c.residual / (1.0 + b);
        worst = std::max(worst, rel);
        ++count;
        if (!(rel <= 1e-7)) out.ok = false;
      }
    }
  }
  out.detail = fmt::format("{} points, max |tangential b|/(1+|b|) {:.2e}", count, worst);
  return out;
}

Outcome ac6() {
  Outcome out;
  double sphere = 0.0, plane = 0.0, fd = 0.0;
  for (double rho : {0.5, 1.0, 2.0}) {
    const MeasureSpec mu = builtin(fmt::format("sphere:2:{}", rho));
    for (const auto& z : default_centers(mu)) {
      const CurvatureReport c = curvature_at(mu.manifold, z);
      sphere = std::max(sphere, std::abs(c.norm_H * rho - 1.0));
      const GraphChart chart = identity_chart(mu.manifold, z);
      fd = std::max(fd, (mean_curvature_trace_formula(chart, Vec::Zero(2)) -
                         c.mean_curvature).norm() * rho);
    }
  }
  const MeasureSpec p = builtin("plane");
  for (const auto& z : default_centers(p)) {
    plane = std::max(plane, curvature_at(p.manifold, z).norm_H);
    const GraphChart chart = identity_chart(p.manifold, z);
    fd = std::max(fd, mean_curvature_trace_formula(chart, Vec::Zero(2)).norm());
  }
  out.ok = sphere <= 1e-6 && plane <= 1e-10 && fd <= 1e-6;
  out.detail = fmt::format("sphere rel {:.2e}, plane |H| {:.2e}, trace-formula gap {:.2e}",
                           sphere, plane, fd);
  return out;
}

Outcome ac7() {
  Outcome out;
  SucpOptions opt;
  opt.chain_length = 3;
  opt.quadrature = quad();
  const MeasureSpec p = builtin("plane");
  const auto plane = sucp_probe(p, default_centers(p), opt);
  for (const auto& pt : plane.points) {
    // Links repeat each chain ball once per radius; count the balls.
    std::vector<Vec> balls;
    for (const auto& link : pt.chain) {
      bool seen = false;
      for (const auto& b : balls) seen = seen || (b - link.center).norm() == 0.0;
      if (!seen) balls.push_back(link.center);
    }
    if (pt.status != SucpStatus::flat_confirmed || balls.size() != 3) out.ok = false;
  }
  std::string sph;
  for (double rho : {0.5, 1.0, 2.0}) {
    const MeasureSpec s = builtin(fmt::format("sphere:2:{}", rho));
    const auto rep = sucp_probe(s, default_centers(s), opt);
    for (const auto& pt : rep.points)
      if (pt.status != SucpStatus::curvature_nonvanishing) out.ok = false;
    if (!(rep.min_norm_H >= 0.5 / rho)) out.ok = false;
    sph += fmt::format(" {:.3f}", rep.min_norm_H * rho);
  }
  const MeasureSpec c = builtin("kp_cone");
  std::vector<Vec> smooth;
  for (const auto& z : default_centers(c))
    if (!singular(c, z)) smooth.push_back(z);
  const auto cone = sucp_probe(c, smooth, opt);
  for (const auto& pt : cone.points)
    if (pt.status != SucpStatus::curvature_nonvanishing) out.ok = false;
  if (!(cone.min_norm_H > 0.0)) out.ok = false;
  out.detail = fmt::format("plane chains flat, sphere min|H|*rho{}, cone min|H| {:.4f}", sph,
                           cone.min_norm_H);
  return out;
}

Outcome ac8() {
  Outcome out;
  MeasureSpec mu = builtin("plane");
  mu.c = 2.0;
  WucpOptions opt;
  opt.quadrature = quad();
  opt.sucp.quadrature = quad();
  const WucpReport rep = wucp_probe(mu, Vec::Zero(3), 1.0, opt);
  if (!rep.density || !rep.rescaled_uniformity) {
    return {false, fmt::format("pipeline stopped: {}", to_string(rep.verdict))};
  }
  const auto& d = *rep.density;
  double pairing = 0.0;
  for (const auto& s : d.samples) {
    pairing = std::max(pairing, std::abs(1.0 / s.c - (1.0 / s.K - 1.0)));
  }
  out.ok = std::abs(d.c - 2.0) <= 1e-10 && std::abs(d.K - 2.0 / 3.0) <= 1e-10 &&
           pairing <= 1e-12 &&
           rep.rescaled_uniformity->verdict == UniformityVerdict::locally_uniform &&
           rep.verdict == WucpVerdict::flat_continuation_confirmed;
  out.detail = fmt::format("c {:.12f}, K {:.12f}, pairing {:.1e}, rescaled {}", d.c, d.K,
                           pairing, to_string(rep.rescaled_uniformity->verdict));
  return out;
}

Outcome ac9() {
  Outcome out;
  struct Case {
    std::string label;
    Vec z;
    double r;
  };
  std::vector<Case> grid;
  for (const auto& label : {"plane", "sphere:2:1", "s3_in_r4", "kp_cone"}) {
    const MeasureSpec mu = builtin(label);
    const auto centers = default_centers(mu);
    for (std::size_t i = 0; i < 5; ++i) {
      const double r = std::vector<double>{0.1, 0.25, 0.5, 0.75, 1.0}[i];
      grid.push_back({label, centers[i % centers.size()], r});
    }
  }
  constexpr std::size_t kSamples = 1000000;
  double worst = 0.0;
  for (const auto& c : grid) {
    const MeasureSpec mu = builtin(c.label);
    BallIntegrand f;
    f.output_dim = 2;
    f.component_scale = {1.0, c.r * c.r};
    const Vec z = c.z;
    f.eval = [z](const Vec& y, std::span<double> o) {
      o[0] = 1.0;
      o[1] = (y - z).squaredNorm();
    };
    const BallRegion region{c.z, c.r};
    const QuadratureResult a = integrate_over_ball(mu.manifold, region, f, quad());
    const QuadratureResult m = monte_carlo_fallback(mu.manifold, region, f, kSamples, kDefaultSeed);
    const QuadratureResult again = monte_carlo_fallback(mu.manifold, region, f, kSamples, kDefaultSeed);
    for (int i = 0; i < 2; ++i) {
      const double ratio = std::abs(a.value[i] - m.value[i]) / (a.error[i] + m.error[i]);
      worst = std::max(worst, ratio);
      if (!(ratio <= 3.0)) out.ok = false;
      if (m.value[i] != again.value[i] || m.error[i] != again.error[i]) out.ok = false;
    }
  }
  RunConfig cfg;
  cfg.measure = "kp_cone";
  cfg.suites = {"uniformity", "quadrature"};
  cfg.radii = {0.3, 0.6};
  const bool same_json = emit_json(run(cfg)) == emit_json(run(cfg));
  const bool same_csv = emit_csv(run(cfg)) == emit_csv(run(cfg));
  out.ok = out.ok && same_json && same_csv;
  out.detail = fmt::format("{} cases at 1e6 samples, worst gap {:.2f} combined errors, "
                           "repeat runs byte-identical: {}",
                           grid.size(), worst, same_json && same_csv ? "yes" : "no");
  return out;
}

Outcome ac10() {
  Outcome out;
  const auto radii = geometric_radii(3, 10);
  auto slope = [&](const char* label, const Vec& z) {
    return dimension_probe(radial_profile(builtin(label), z, radii, quad())).slope;
  };
  const double plane = slope("plane", Vec::Zero(3));
  const double s2 = slope("sphere:2:1", v({0, 0, -1}));
  const double s3 = slope("s3_in_r4", v({0, 0, 0, -1}));
  out.ok = std::abs(plane - 2.0) <= 1e-3 && std::abs(s2 - 2.0) <= 1e-3 &&
           std::abs(s3 - 3.0) <= 5e-2;
  out.detail = fmt::format("plane {:.6f}, S2 {:.6f}, S3 {:.6f} (r = 2^-10..2^-3)", plane, s2,
                           s3);
  return out;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  apply_thread_cap_from_env();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 uniformity oracles", ac1},     {"AC2 elementary identity", ac2},
      {"AC3 key equality", ac3},           {"AC4 second-moment lemma", ac4},
      {"AC5 orthogonality of b", ac5},     {"AC6 mean curvature", ac6},
      {"AC7 strong continuation", ac7},    {"AC8 weak continuation", ac8},
      {"AC9 adaptive vs Monte Carlo", ac9}, {"AC10 dimension probe", ac10},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failures += o.ok ? 0 : 1;
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
