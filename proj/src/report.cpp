#include "gmtlab/report.hpp"

#include "gmtlab/errors.hpp"
#include "gmtlab/measure.hpp"
#include "gmtlab/moments.hpp"
#include "gmtlab/verification.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gmtlab {

using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Config parsing

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::config, fmt::format("{}: '{}' is not a number", key, text));
}

long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::config, fmt::format("{}: '{}' is not an integer", key, text));
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorKind::config, fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<Vec> to_centers(const std::string& key, const std::string& text) {
  std::vector<Vec> out;
  if (text == "default") return out;
  for (const auto& point : split(text, ';')) {
    const auto coords = split(point, ',');
    Vec v(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) v[i] = to_double(key, coords[i]);
    out.push_back(v);
  }
  return out;
}

std::string centers_text(const std::vector<Vec>& centers) {
  if (centers.empty()) return "default";
  std::string out;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (i > 0) out += ";";
    for (Eigen::Index j = 0; j < centers[i].size(); ++j) {
      if (j > 0) out += ",";
      out += fmt::format("{:.17g}", centers[i][j]);
    }
  }
  return out;
}

std::string radii_text(const std::vector<double>& radii) {
  if (radii.empty()) return "default";
  std::string out;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i > 0) out += ",";
    out += fmt::format("{:.17g}", radii[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suites

std::string verdict_of(bool ok) { return ok ? "pass" : "fail"; }

Record make_record(std::string quantity, double value, double error, std::string verdict,
                   std::optional<Vec> center = std::nullopt,
                   std::optional<double> radius = std::nullopt,
                   std::string method = "adaptive_cubature",
                   std::size_t evaluations = 0) {
  Record r;
  r.quantity = std::move(quantity);
  r.center = std::move(center);
  r.radius = radius;
  r.value = value;
  r.error = error;
  r.verdict = std::move(verdict);
  r.method = std::move(method);
  r.evaluations = evaluations;
  return r;
}

bool is_singular(const MeasureSpec& mu, const Vec& z) {
  for (const auto& s : mu.manifold.singular_points()) {
    if ((s - z).norm() <= 1e-10) return true;
  }
  return false;
}

struct SuiteContext {
  const RunConfig& config;
  const MeasureSpec& mu;
  QuadratureOptions quadrature;
  std::vector<Vec> centers;

  std::vector<double> radii_or(std::vector<double> fallback) const {
    return config.radii.empty() ? fallback : config.radii;
  }
  std::vector<Vec> regular_centers() const {
    std::vector<Vec> out;
    for (const auto& c : centers) {
      if (!is_singular(mu, c)) out.push_back(c);
    }
    return out;
  }
};

void uniformity_suite(const SuiteContext& ctx, SuiteResult& out) {
  const auto radii = ctx.radii_or({0.1, 0.25, 0.5, 1.0});
  const UniformityReport rep =
      check_local_uniform(ctx.mu, ctx.centers, radii, ctx.config.tol, ctx.quadrature);
  for (const auto& p : rep.points) {
    const bool ok = p.sample.converged &&
                    std::abs(p.deviation) <= rep.tol + p.deviation_error;
    out.records.push_back(make_record("deviation", p.deviation, p.deviation_error,
                                      p.sample.converged ? verdict_of(ok) : "inconclusive",
                                      p.sample.center, p.sample.radius,
                                      "adaptive_cubature", p.sample.evaluations));
  }
  out.records.push_back(make_record("max_abs_deviation", rep.max_abs_deviation, 0.0,
                                    to_string(rep.verdict)));
  out.status = rep.verdict == UniformityVerdict::locally_uniform ? SuiteStatus::pass
                                                                 : SuiteStatus::fail;
}

void distributed_suite(const SuiteContext& ctx, SuiteResult& out) {
  const auto radii = ctx.radii_or({0.1, 0.25, 0.5, 1.0});
  const DistributionReport rep = check_uniformly_distributed(
      ctx.mu, ctx.centers, radii, ctx.config.tol, ctx.quadrature);
  for (const auto& s : rep.samples) {
    out.records.push_back(make_record("ball_mass", s.mass, s.error,
                                      s.converged ? "info" : "inconclusive", s.center,
                                      s.radius, "adaptive_cubature", s.evaluations));
  }
  for (const auto& w : rep.worst_pairs) {
    out.records.push_back(make_record("max_pair_difference", w.difference, w.allowed,
                                      verdict_of(w.difference <= w.allowed),
                                      std::nullopt, w.radius));
  }
  out.records.push_back(make_record("max_relative_difference",
                                    rep.max_relative_difference, 0.0,
                                    to_string(rep.verdict)));
  out.status = rep.verdict == Verdict::pass ? SuiteStatus::pass : SuiteStatus::fail;
}

void identities_suite(const SuiteContext& ctx, SuiteResult& out) {
  const auto radii = ctx.radii_or({0.1, 0.25, 0.4});
  const double tol = ctx.config.identity_tol;
  const auto directions =
      default_tangent_directions(ctx.mu.k, ctx.config.directions, ctx.config.seed);
  bool all_ok = true;
  auto add = [&](Record r, bool ok) {
    all_ok = all_ok && ok;
    out.records.push_back(std::move(r));
  };
  auto passes = [](const IdentityCase& c, double allowed) {
    return c.converged && c.residual <= std::max(allowed, 3.0 * c.error);
  };
  for (const auto& z : ctx.centers) {
    if (is_singular(ctx.mu, z)) {
      out.records.push_back(make_record("skipped_singular_center", 0.0, 0.0, "info", z));
      continue;
    }
    for (double r : radii) {
      const IdentityCase e = elementary_identity_residual(ctx.mu, z, r, ctx.quadrature);
      const double scale = std::pow(r, ctx.mu.k + 2);
      add(make_record("elementary_identity_residual", e.residual, e.error,
                      verdict_of(passes(e, tol * scale)), z, r, "adaptive_cubature",
                      e.evaluations),
          passes(e, tol * scale));

      const IdentityCase key = key_equality_residual(ctx.mu, z, r, ctx.quadrature);
      add(make_record("key_equality_lhs", key.lhs, key.error, "info", z, r), true);
      add(make_record("key_equality_rhs", key.rhs, key.error, "info", z, r), true);
      add(make_record("key_equality_residual", key.residual, key.error,
                      verdict_of(passes(key, tol)), z, r, "adaptive_cubature",
                      key.evaluations),
          passes(key, tol));

      const auto hm = hessian_moment_residual(ctx.mu, z, r, directions, ctx.quadrature);
      double worst = 0.0;
      double worst_err = 0.0;
      bool hm_ok = true;
      for (const auto& c : hm) {
        if (c.residual >= worst) {
          worst = c.residual;
          worst_err = c.error;
        }
        hm_ok = hm_ok && passes(c, tol);
      }
      Record rec = make_record("hessian_moment_max_residual", worst, worst_err,
                               verdict_of(hm_ok), z, r, "adaptive_cubature",
                               hm.front().evaluations);
      rec.seed = ctx.config.seed;
      add(std::move(rec), hm_ok);

      const IdentityCase orth = orthogonality_check(ctx.mu, z, r, ctx.quadrature);
      const bool orth_ok = orth.converged && orth.residual <= tol * (1.0 + orth.rhs);
      add(make_record("b_tangential_norm", orth.residual, orth.error, verdict_of(orth_ok),
                      z, r, "adaptive_cubature", orth.evaluations),
          orth_ok);

      const TaylorBoundReport tb = taylor_bound_check(
          ctx.mu, z, r, default_taylor_probes(ctx.mu.manifold, z, r), ctx.quadrature);
      add(make_record("taylor_empirical_constant", tb.empirical_constant, 0.0,
                      verdict_of(tb.stable), z, r, "adaptive_cubature", tb.evaluations),
          tb.stable);
    }
  }
  out.status = all_ok ? SuiteStatus::pass : SuiteStatus::fail;
}

void sucp_suite(const SuiteContext& ctx, SuiteResult& out) {
  SucpOptions opt;
  opt.chain_length = ctx.config.chain_length;
  opt.quadrature = ctx.quadrature;
  if (!ctx.config.radii.empty()) opt.radii = ctx.config.radii;
  const auto points = ctx.regular_centers();
  bool all_ok = true;
  for (const auto& z : points) {
    const CurvatureReport cr = curvature_at(ctx.mu.manifold, z);
    const GraphChart chart = identity_chart(ctx.mu.manifold, z);
    const Vec fd = mean_curvature_trace_formula(chart, Vec::Zero(chart.k()));
    const double gap = (fd - cr.mean_curvature).norm() / std::max(1.0, cr.norm_H);
    out.records.push_back(make_record("mean_curvature_norm", cr.norm_H, 0.0, "info", z,
                                      std::nullopt, "closed_form"));
    out.records.push_back(make_record("trace_formula_gap", gap, 0.0, verdict_of(gap <= 1e-6),
                                      z, std::nullopt, "finite_difference"));
    all_ok = all_ok && gap <= 1e-6;
  }
  const SucpReport rep = sucp_probe(ctx.mu, points, opt);
  for (const auto& p : rep.points) {
    for (const auto& l : p.chain) {
      out.records.push_back(make_record("plane_normal_moment", l.normal_moment,
                                        l.normal_moment_error, verdict_of(l.flat),
                                        l.center, l.radius));
    }
    out.records.push_back(make_record("sucp_norm_H", p.norm_H, 0.0, to_string(p.status),
                                      p.point, std::nullopt, "closed_form"));
    all_ok = all_ok && p.status != SucpStatus::curved;
  }
  out.records.push_back(make_record("min_norm_H", rep.min_norm_H, 0.0, "info"));
  out.status = all_ok ? SuiteStatus::pass : SuiteStatus::fail;
}

void wucp_suite(const SuiteContext& ctx, SuiteResult& out) {
  WucpOptions opt;
  opt.k_guess = ctx.config.k_guess;
  opt.quadrature = ctx.quadrature;
  opt.uniformity_tol = ctx.config.tol;
  opt.sucp.chain_length = ctx.config.chain_length;
  opt.sucp.quadrature = ctx.quadrature;
  const Vec z0 = ctx.centers.front();
  const WucpReport rep = wucp_probe(ctx.mu, z0, ctx.config.r0, opt);
  out.records.push_back(make_record("patch_normal_moment", rep.normal_moment, 0.0,
                                    rep.hypothesis_holds ? "flat_patch" : "hypothesis_fails",
                                    z0, rep.r0));
  out.records.push_back(make_record("patch_mass", rep.patch_mass, 0.0, "info", z0, rep.r0));
  if (rep.density) {
    double pairing = 0.0;
    for (const auto& s : rep.density->samples) pairing = std::max(pairing, s.pairing_residual);
    out.records.push_back(make_record("density_c", rep.density->c, rep.density->c_spread,
                                      "info", z0));
    out.records.push_back(make_record("density_K", rep.density->K, rep.density->K_spread,
                                      "info", z0));
    out.records.push_back(make_record("pairing_residual_max", pairing, 0.0,
                                      verdict_of(pairing <= 1e-12), z0));
  }
  if (rep.rescaled_uniformity) {
    out.records.push_back(make_record("rescaled_max_abs_deviation",
                                      rep.rescaled_uniformity->max_abs_deviation, 0.0,
                                      to_string(rep.rescaled_uniformity->verdict)));
  }
  if (rep.rescaled_sucp && !rep.rescaled_sucp->points.empty()) {
    const auto& p = rep.rescaled_sucp->points.front();
    out.records.push_back(make_record("rescaled_norm_H", p.norm_H, 0.0, to_string(p.status),
                                      p.point, std::nullopt, "closed_form"));
  }
  out.records.push_back(make_record("wucp_verdict", 0.0, 0.0, to_string(rep.verdict), z0,
                                    rep.r0, "none"));
  out.status = rep.verdict == WucpVerdict::continuation_fails ? SuiteStatus::fail
                                                               : SuiteStatus::pass;
}

void dimension_suite(const SuiteContext& ctx, SuiteResult& out) {
  const Vec z = ctx.centers.front();
  const auto radii = ctx.radii_or(geometric_radii(3, 10));
  const RadialMassProfile profile = radial_profile(ctx.mu, z, radii, ctx.quadrature);
  for (const auto& s : profile.samples) {
    out.records.push_back(make_record("ball_mass", s.mass, s.error, "info", z, s.radius,
                                      "adaptive_cubature", s.evaluations));
  }
  const DimensionEstimate d = dimension_probe(profile);
  const bool ok = std::abs(d.slope - ctx.mu.k) <= ctx.config.dimension_tol;
  out.records.push_back(make_record("dimension_slope", d.slope, d.residual_rms,
                                    verdict_of(ok), z));
  try {
    const DensityLimits dl = density_limits(profile, ctx.mu.k);
    out.records.push_back(make_record("density_c", dl.c, dl.c_spread, "info", z));
    out.records.push_back(make_record("density_K", dl.K, dl.K_spread, "info", z));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::non_convergent && e.kind() != ErrorKind::precondition) throw;
    out.records.push_back(make_record("density_c", std::nan(""), 0.0, "inconclusive", z));
  }
  out.status = ok ? SuiteStatus::pass : SuiteStatus::fail;
}

void quadrature_suite(const SuiteContext& ctx, SuiteResult& out) {
  const auto radii = ctx.radii_or({0.25, 0.5});
  bool all_ok = true;
  for (const auto& z : ctx.centers) {
    for (double r : radii) {
      BallIntegrand f;
      f.output_dim = 2;
      f.component_scale = {1.0, r * r};
      f.eval = [z](const Vec& y, std::span<double> v) {
        v[0] = 1.0;
        v[1] = (y - z).squaredNorm();
      };
      const QuadratureResult a = integrate_over_ball(ctx.mu.manifold, {z, r}, f,
                                                     ctx.quadrature);
      const QuadratureResult m =
          monte_carlo_fallback(ctx.mu.manifold, {z, r}, f, ctx.config.mc_samples,
                               ctx.config.seed, ctx.quadrature.policy);
      static const char* names[] = {"mass_gap", "second_moment_gap"};
      for (int i = 0; i < 2; ++i) {
        const double gap = std::abs(a.value[i] - m.value[i]) * ctx.mu.c;
        const double allowed = 3.0 * (a.error[i] + m.error[i]) * ctx.mu.c;
        const bool ok = gap <= allowed;
        all_ok = all_ok && ok;
        Record rec = make_record(names[i], gap, allowed, verdict_of(ok), z, r,
                                 "monte_carlo", m.evaluations);
        rec.seed = ctx.config.seed;
        out.records.push_back(std::move(rec));
      }
    }
  }
  out.status = all_ok ? SuiteStatus::pass : SuiteStatus::fail;
}

// ---------------------------------------------------------------------------
// Serialization

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Vec vec_from(const Json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number_from(j[i]);
  return v;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["measure"] = c.measure;
  j["density"] = c.density;
  j["suite"] = c.suites;
  j["centers"] = centers_text(c.centers);
  j["radii"] = radii_text(c.radii);
  j["tol"] = c.tol;
  j["identity_tol"] = c.identity_tol;
  j["dimension_tol"] = c.dimension_tol;
  j["rel_tol"] = c.rel_tol;
  j["seed"] = c.seed;
  j["directions"] = c.directions;
  j["chain_length"] = c.chain_length;
  j["r0"] = c.r0;
  j["k_guess"] = c.k_guess;
  j["mc_samples"] = c.mc_samples;
  j["policy"] = c.policy == ExecPolicy::serial ? "serial" : "parallel";
  j["format"] = c.format;
  j["out"] = c.out;
  j["timing"] = c.timing;
  return j;
}

RunConfig config_from(const Json& j) {
  RunConfig c;
  c.measure = j.at("measure").get<std::string>();
  c.density = j.at("density").get<double>();
  c.suites = j.at("suite").get<std::vector<std::string>>();
  c.centers = to_centers("centers", j.at("centers").get<std::string>());
  const auto radii = j.at("radii").get<std::string>();
  if (radii != "default") {
    for (const auto& r : split(radii, ',')) c.radii.push_back(to_double("radii", r));
  }
  c.tol = j.at("tol").get<double>();
  c.identity_tol = j.at("identity_tol").get<double>();
  c.dimension_tol = j.at("dimension_tol").get<double>();
  c.rel_tol = j.at("rel_tol").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.directions = j.at("directions").get<int>();
  c.chain_length = j.at("chain_length").get<int>();
  c.r0 = j.at("r0").get<double>();
  c.k_guess = j.at("k_guess").get<int>();
  c.mc_samples = j.at("mc_samples").get<std::size_t>();
  c.policy = j.at("policy").get<std::string>() == "serial" ? ExecPolicy::serial
                                                          : ExecPolicy::parallel;
  c.format = j.at("format").get<std::string>();
  c.out = j.at("out").get<std::string>();
  c.timing = j.at("timing").get<bool>();
  return c;
}

SuiteStatus status_from(const std::string& s) {
  if (s == "pass") return SuiteStatus::pass;
  if (s == "fail") return SuiteStatus::fail;
  if (s == "error") return SuiteStatus::error;
  throw Error(ErrorKind::config, fmt::format("unknown suite status '{}'", s));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string("nan");
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(SuiteStatus s) noexcept {
  switch (s) {
    case SuiteStatus::pass: return "pass";
    case SuiteStatus::fail: return "fail";
    case SuiteStatus::error: return "error";
  }
  return "?";
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "measure") {
    c.measure = value;
  } else if (key == "density") {
    c.density = to_double(key, value);
  } else if (key == "suite") {
    c.suites = split(value, ',');
  } else if (key == "centers") {
    c.centers = to_centers(key, value);
  } else if (key == "radii" || key == "radius") {
    c.radii.clear();
    if (value != "default") {
      for (const auto& r : split(value, ',')) c.radii.push_back(to_double(key, r));
    }
  } else if (key == "tol") {
    c.tol = to_double(key, value);
  } else if (key == "identity_tol") {
    c.identity_tol = to_double(key, value);
  } else if (key == "dimension_tol") {
    c.dimension_tol = to_double(key, value);
  } else if (key == "rel_tol") {
    c.rel_tol = to_double(key, value);
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) throw Error(ErrorKind::config, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "directions") {
    c.directions = static_cast<int>(to_integer(key, value));
  } else if (key == "chain_length") {
    c.chain_length = static_cast<int>(to_integer(key, value));
  } else if (key == "r0") {
    c.r0 = to_double(key, value);
  } else if (key == "k_guess") {
    c.k_guess = static_cast<int>(to_integer(key, value));
  } else if (key == "mc_samples") {
    const long long n = to_integer(key, value);
    if (n < 1000) throw Error(ErrorKind::config, "mc_samples must be at least 1000");
    c.mc_samples = static_cast<std::size_t>(n);
  } else if (key == "policy") {
    if (value != "serial" && value != "parallel") {
      throw Error(ErrorKind::config, "policy must be serial or parallel");
    }
    c.policy = value == "serial" ? ExecPolicy::serial : ExecPolicy::parallel;
  } else if (key == "format") {
    c.format = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "timing") {
    c.timing = to_bool(key, value);
  } else {
    throw Error(ErrorKind::config, fmt::format("unknown config key '{}'", key));
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config, fmt::format("line {}: expected key = value", number));
    }
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, fmt::format("cannot read config '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), std::move(base));
}

std::vector<std::string> expanded_suites(const RunConfig& config) {
  std::vector<std::string> out;
  auto push = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& s : config.suites) {
    if (s == "all") {
      for (std::size_t i = 0; i < 6; ++i) push(kSuiteNames[i]);
    } else if (std::find(kSuiteNames.begin(), kSuiteNames.end(), s) != kSuiteNames.end()) {
      push(s);
    } else {
      throw Error(ErrorKind::config, fmt::format("unknown suite '{}'", s));
    }
  }
  return out;
}

void validate(const RunConfig& c) {
  if (c.suites.empty()) throw Error(ErrorKind::config, "no suite selected");
  expanded_suites(c);
  for (double r : c.radii) {
    if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorKind::config, "radii must lie in (0, 1]");
  }
  for (double t : {c.tol, c.identity_tol, c.dimension_tol, c.rel_tol, c.density, c.r0}) {
    if (!(t > 0.0)) throw Error(ErrorKind::config, "tolerances, density and r0 must be positive");
  }
  if (c.rel_tol < 1e-12) throw Error(ErrorKind::config, "rel_tol must be at least 1e-12");
  if (c.directions < 0 || c.chain_length < 1) {
    throw Error(ErrorKind::config, "directions >= 0 and chain_length >= 1 required");
  }
  if (c.format != "json" && c.format != "csv") {
    throw Error(ErrorKind::config, "format must be json or csv");
  }
}

ReportEnvelope run(const RunConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ReportEnvelope env;
  env.config = config;

  MeasureSpec mu = builtin(config.measure);
  mu.c = config.density;
  QuadratureOptions q;
  q.rel_tol = config.rel_tol;
  q.policy = config.policy;
  std::vector<Vec> centers = config.centers.empty() ? default_centers(mu) : config.centers;
  for (const auto& c : centers) {
    if (c.size() != mu.manifold.ambient_dim()) {
      throw Error(ErrorKind::config,
                  fmt::format("centres need {} coordinates", mu.manifold.ambient_dim()));
    }
    if (!mu.manifold.contains(c, 1e-9)) {
      throw Error(ErrorKind::point_off_manifold,
                  fmt::format("centre ({}) is not on {}", centers_text({c}),
                              mu.manifold.describe()));
    }
  }
  const SuiteContext ctx{config, mu, q, centers};

  for (const auto& name : expanded_suites(config)) {
    SuiteResult suite;
    suite.name = name;
    try {
      if (name == "uniformity") uniformity_suite(ctx, suite);
      else if (name == "distributed") distributed_suite(ctx, suite);
      else if (name == "identities") identities_suite(ctx, suite);
      else if (name == "sucp") sucp_suite(ctx, suite);
      else if (name == "wucp") wucp_suite(ctx, suite);
      else if (name == "dimension") dimension_suite(ctx, suite);
      else if (name == "quadrature") quadrature_suite(ctx, suite);
    } catch (const Error& e) {
      suite.status = SuiteStatus::error;
      suite.message = e.what();
    }
    env.suites.push_back(std::move(suite));
  }

  env.overall = SuiteStatus::pass;
  for (const auto& s : env.suites) {
    if (s.status == SuiteStatus::error) env.overall = SuiteStatus::error;
    else if (s.status == SuiteStatus::fail && env.overall == SuiteStatus::pass) {
      env.overall = SuiteStatus::fail;
    }
  }
  if (config.timing) {
    env.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return env;
}

int exit_code(const ReportEnvelope& report) {
  switch (report.overall) {
    case SuiteStatus::pass: return 0;
    case SuiteStatus::fail: return 1;
    case SuiteStatus::error: return 2;
  }
  return 2;
}

std::string emit_json(const ReportEnvelope& report) {
  Json j;
  j["schema_version"] = report.schema_version;
  j["tool"] = report.tool;
  j["version"] = report.version;
  j["config"] = config_json(report.config);
  Json suites = Json::array();
  for (const auto& s : report.suites) {
    Json js;
    js["name"] = s.name;
    js["verdict"] = to_string(s.status);
    js["message"] = s.message;
    Json records = Json::array();
    for (const auto& r : s.records) {
      Json jr;
      jr["quantity"] = r.quantity;
      jr["center"] = r.center ? vec_json(*r.center) : Json(nullptr);
      jr["radius"] = r.radius ? number(*r.radius) : Json(nullptr);
      jr["value"] = number(r.value);
      jr["error"] = number(r.error);
      jr["verdict"] = r.verdict;
      jr["provenance"] = {{"method", r.method},
                          {"evaluations", r.evaluations},
                          {"seed", r.seed ? Json(*r.seed) : Json(nullptr)}};
      records.push_back(std::move(jr));
    }
    js["records"] = std::move(records);
    suites.push_back(std::move(js));
  }
  j["suites"] = std::move(suites);
  j["wall_time_seconds"] =
      report.wall_time_seconds ? Json(*report.wall_time_seconds) : Json(nullptr);
  j["overall_verdict"] = to_string(report.overall);
  return j.dump(2) + "\n";
}

ReportEnvelope parse_json_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::io, fmt::format("malformed report: {}", e.what()));
  }
  ReportEnvelope env;
  env.schema_version = j.at("schema_version").get<std::string>();
  env.tool = j.at("tool").get<std::string>();
  env.version = j.at("version").get<std::string>();
  env.config = config_from(j.at("config"));
  for (const auto& js : j.at("suites")) {
    SuiteResult s;
    s.name = js.at("name").get<std::string>();
    s.status = status_from(js.at("verdict").get<std::string>());
    s.message = js.at("message").get<std::string>();
    for (const auto& jr : js.at("records")) {
      Record r;
      r.quantity = jr.at("quantity").get<std::string>();
      if (!jr.at("center").is_null()) r.center = vec_from(jr.at("center"));
      if (!jr.at("radius").is_null()) r.radius = jr.at("radius").get<double>();
      r.value = number_from(jr.at("value"));
      r.error = number_from(jr.at("error"));
      r.verdict = jr.at("verdict").get<std::string>();
      const auto& p = jr.at("provenance");
      r.method = p.at("method").get<std::string>();
      r.evaluations = p.at("evaluations").get<std::size_t>();
      if (!p.at("seed").is_null()) r.seed = p.at("seed").get<std::uint64_t>();
      s.records.push_back(std::move(r));
    }
    env.suites.push_back(std::move(s));
  }
  if (!j.at("wall_time_seconds").is_null()) {
    env.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  }
  env.overall = status_from(j.at("overall_verdict").get<std::string>());
  return env;
}

std::string emit_csv(const ReportEnvelope& report) {
  std::string out = "suite,measure,center,radius,quantity,value,error,verdict\n";
  for (const auto& s : report.suites) {
    for (const auto& r : s.records) {
      std::string center;
      if (r.center) {
        for (Eigen::Index i = 0; i < r.center->size(); ++i) {
          if (i > 0) center += ";";
          center += csv_number((*r.center)[i]);
        }
      }
      out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(s.name),
                         csv_field(report.config.measure), center,
                         r.radius ? csv_number(*r.radius) : std::string(),
                         csv_field(r.quantity), csv_number(r.value), csv_number(r.error),
                         csv_field(r.verdict));
    }
    if (s.status == SuiteStatus::error) {
      out += fmt::format("{},{},,,error,nan,nan,{}\n", csv_field(s.name),
                         csv_field(report.config.measure), csv_field(s.message));
    }
  }
  return out;
}

void emit(const ReportEnvelope& report, const std::string& format,
          const std::string& path) {
  std::string text;
  if (format == "json") text = emit_json(report);
  else if (format == "csv") text = emit_csv(report);
  else throw Error(ErrorKind::config, fmt::format("unknown format '{}'", format));
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::io, fmt::format("cannot write '{}'", path));
  file << text;
  if (!file) throw Error(ErrorKind::io, fmt::format("write to '{}' failed", path));
}

}  // namespace gmtlab
