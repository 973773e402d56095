#include "gmtlab/measure.hpp"

#include "gmtlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace gmtlab {

namespace {

std::vector<std::string> split_label(const std::string& label) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : label) {
    if (ch == ':' || ch == '_') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  return parts;
}

double parse_number(const std::string& text, const std::string& label) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::unknown_label,
              fmt::format("cannot parse parameter '{}' in '{}'", text, label));
}

Vec unit_pattern(int n, int seed) {
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = std::sin(1.3 * (i + 1) + 0.7 * seed) + 0.25 * (i % 2 == 0 ? 1 : -1);
  }
  return v / v.norm();
}

}  // namespace

MeasureSpec make_measure(ManifoldDescriptor manifold, double c,
                         std::string label) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::precondition, "density multiplier must be positive");
  }
  const int k = manifold.k();
  return MeasureSpec{std::move(manifold), k, c, std::move(label)};
}

MeasureSpec builtin(const std::string& label, const BuiltinParams& params) {
  if (label == "s3_in_r4") {
    return make_measure(ManifoldDescriptor::sphere(3, 1.0, 4), 1.0, label);
  }
  if (label == "kp_cone") {
    return make_measure(ManifoldDescriptor::kp_cone(), 1.0, label);
  }
  const auto parts = split_label(label);
  BuiltinParams p = params;
  if (parts[0] == "plane") {
    if (parts.size() == 3) {
      p.k = static_cast<int>(parse_number(parts[1], label));
      p.ambient_dim = static_cast<int>(parse_number(parts[2], label));
    } else if (parts.size() != 1) {
      throw Error(ErrorKind::unknown_label, "expected plane:<k>:<n+1>");
    }
    return make_measure(ManifoldDescriptor::plane(p.k, p.ambient_dim), 1.0,
                        fmt::format("plane:{}:{}", p.k, p.ambient_dim));
  }
  if (parts[0] == "sphere") {
    if (parts.size() == 3) {
      p.k = static_cast<int>(parse_number(parts[1], label));
      p.rho = parse_number(parts[2], label);
    } else if (parts.size() != 1) {
      throw Error(ErrorKind::unknown_label, "expected sphere:<k>:<rho>");
    }
    return make_measure(ManifoldDescriptor::sphere(p.k, p.rho), 1.0,
                        fmt::format("sphere:{}:{}", p.k, p.rho));
  }
  throw Error(ErrorKind::unknown_label, fmt::format("unknown measure '{}'", label));
}

MeasureSpec rescale(const MeasureSpec& mu, double r0, double c_est) {
  if (!(r0 > 0.0) || !(c_est > 0.0)) {
    throw Error(ErrorKind::precondition, "rescale needs r0 > 0 and c_est > 0");
  }
  return make_measure(mu.manifold.dilated(4.0 / r0), mu.c / c_est,
                      mu.label + "~rescaled");
}

QuadratureResult ball_mass(const MeasureSpec& mu, const Vec& z, double r,
                           const QuadratureOptions& options) {
  QuadratureResult out = integrate_over_ball(
      mu.manifold, BallRegion{z, r},
      scalar_integrand([](const Vec&) { return 1.0; }), options);
  out.value *= mu.c;
  out.error *= mu.c;
  return out;
}

std::vector<double> geometric_radii(int first, int last) {
  std::vector<double> radii;
  for (int m = last; m >= first; --m) radii.push_back(std::ldexp(1.0, -m));
  return radii;
}

RadialMassProfile radial_profile(const MeasureSpec& mu, const Vec& p,
                                 std::vector<double> radii,
                                 const QuadratureOptions& options) {
  if (!mu.manifold.contains(p)) {
    throw Error(ErrorKind::point_off_manifold, "profile centre is off the support");
  }
  std::sort(radii.begin(), radii.end());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] <= 1.0) ||
        (i > 0 && radii[i] == radii[i - 1])) {
      throw Error(ErrorKind::precondition,
                  "profile radii must be distinct and lie in (0, 1]");
    }
  }
  RadialMassProfile profile{p, std::vector<RadialSample>(radii.size())};
  const long count = static_cast<long>(radii.size());
  auto sample = [&](long i) {
    const QuadratureResult mass = ball_mass(mu, p, radii[i], options);
    profile.samples[i] = {radii[i], mass.scalar(), mass.scalar_error(),
                          mass.evaluations};
  };
  for_each_index(count, options.policy, sample);
  return profile;
}

std::vector<Vec> default_centers(const MeasureSpec& mu) {
  const ManifoldDescriptor& m = mu.manifold;
  const int k = m.k();
  const int n1 = m.ambient_dim();
  std::vector<Vec> canonical;
  switch (m.kind()) {
    case ManifoldKind::plane: {
      canonical.push_back(Vec::Zero(n1));
      for (int seed : {1, 2}) {
        Vec c = Vec::Zero(n1);
        c.head(k) = (seed == 1 ? 0.35 : 1.7) * unit_pattern(k, seed);
        canonical.push_back(c);
      }
      break;
    }
    case ManifoldKind::sphere: {
      Vec south = Vec::Zero(n1);
      south[k] = -m.rho();
      canonical.push_back(south);
      for (int seed : {1, 2}) {
        Vec c = Vec::Zero(n1);
        c.head(k + 1) = m.rho() * unit_pattern(k + 1, seed);
        canonical.push_back(c);
      }
      break;
    }
    case ManifoldKind::kp_cone: {
      const double s = 1.0 / std::sqrt(2.0);
      canonical.push_back(Vec::Zero(4));
      canonical.push_back((Vec(4) << s, 0.0, 0.0, s).finished());
      canonical.push_back((Vec(4) << 0.0, 0.6 * s, -0.8 * s, -s).finished());
      canonical.push_back((Vec(4) << -0.48 * s, 0.6 * s, 0.64 * s, s).finished());
      break;
    }
    case ManifoldKind::polynomial_graph: {
      for (int seed : {0, 1}) {
        Vec c = Vec::Zero(n1);
        if (seed == 1) c.head(k) = 0.2 * unit_pattern(k, seed);
        c.tail(m.codim()) = m.graph_value(c.head(k));
        canonical.push_back(c);
      }
      break;
    }
  }
  std::vector<Vec> out;
  for (const auto& c : canonical) out.push_back(m.to_ambient(c));
  return out;
}

}  // namespace gmtlab
