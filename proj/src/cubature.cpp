#include "gmtlab/cubature.hpp"

#include "gmtlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gmtlab {

namespace {

// Kronrod abscissae on [0, 1]; odd indices (1, 3, 5) and the centre carry the
// embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kNodes = 15;
constexpr double kInnerTighten = 0.1;

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> value;
  std::vector<double> error;
  std::vector<double> resabs;
  double scaled_error = 0.0;
};

struct LevelResult {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t evaluations = 0;
  bool converged = true;
};

class NestedIntegrator {
 public:
  NestedIntegrator(const NestedProblem& problem, const CubatureOptions& options)
      : p_(problem), opt_(options) {
    scale_ = p_.component_scale;
    if (scale_.empty()) scale_.assign(p_.output_dim, 1.0);
  }

  LevelResult run() {
    std::vector<double> prefix;
    return integrate_level(0, prefix);
  }

 private:
  double scaled_norm(const std::vector<double>& v) const {
    double out = 0.0;
    for (int c = 0; c < p_.output_dim; ++c) {
      out = std::max(out, std::abs(v[c]) / scale_[c]);
    }
    return out;
  }

  static std::array<double, kNodes> node_positions(double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::array<double, kNodes> x{};
    for (int j = 0; j < 7; ++j) {
      x[2 * j] = centre - half * kXgk[j];
      x[2 * j + 1] = centre + half * kXgk[j];
    }
    x[14] = centre;
    return x;
  }

  // Integrand (or inner integral) at one node of `level`.
  LevelResult node_value(int level, const std::vector<double>& prefix,
                         double x) {
    std::vector<double> coords = prefix;
    coords.push_back(x);
    if (level + 1 == p_.dims) {
      LevelResult r;
      r.value.assign(p_.output_dim, 0.0);
      r.error.assign(p_.output_dim, 0.0);
      p_.integrand(coords, r.value);
      r.evaluations = 1;
      return r;
    }
    return integrate_level(level + 1, coords);
  }

  // Combines 15 node values on [lo, hi] into a Kronrod estimate with error.
  Segment combine(double lo, double hi, const std::vector<LevelResult>& nodes,
                  std::size_t offset) const {
    const double half = 0.5 * (hi - lo);
    const int dim = p_.output_dim;
    Segment s{lo, hi, std::vector<double>(dim, 0.0),
              std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0.0};
    std::vector<double> gauss(dim, 0.0);
    std::vector<double> inner_err(dim, 0.0);
    auto& resabs = s.resabs;
    for (int j = 0; j < 7; ++j) {
      const auto& left = nodes[offset + 2 * j];
      const auto& right = nodes[offset + 2 * j + 1];
      for (int c = 0; c < dim; ++c) {
        const double sum = left.value[c] + right.value[c];
        s.value[c] += kWgk[j] * sum;
        resabs[c] += kWgk[j] * (std::abs(left.value[c]) + std::abs(right.value[c]));
        inner_err[c] += kWgk[j] * (left.error[c] + right.error[c]);
        if (j % 2 == 1) gauss[c] += kWg[j / 2] * sum;
      }
    }
    const auto& mid = nodes[offset + 14];
    for (int c = 0; c < dim; ++c) {
      s.value[c] += kWgk[7] * mid.value[c];
      resabs[c] += kWgk[7] * std::abs(mid.value[c]);
      inner_err[c] += kWgk[7] * mid.error[c];
      gauss[c] += kWg[3] * mid.value[c];
      s.value[c] *= half;
      gauss[c] *= half;
      const double roundoff =
          50.0 * std::numeric_limits<double>::epsilon() * resabs[c] * std::abs(half);
      s.error[c] = std::max(std::abs(s.value[c] - gauss[c]), roundoff) +
                   std::abs(half) * inner_err[c];
      resabs[c] *= std::abs(half);
    }
    s.scaled_error = scaled_norm(s.error);
    return s;
  }

  // Evaluates the 15-node rule on each of `pieces`, concurrently at the
  // outermost level when requested.
  std::vector<Segment> evaluate(int level, const std::vector<double>& prefix,
                                const std::vector<Interval>& pieces,
                                LevelResult& totals) {
    std::vector<double> xs;
    xs.reserve(pieces.size() * kNodes);
    for (const auto& piece : pieces) {
      const auto x = node_positions(piece.lo, piece.hi);
      xs.insert(xs.end(), x.begin(), x.end());
    }
    std::vector<LevelResult> nodes(xs.size());
    const long count = static_cast<long>(xs.size());
    const ExecPolicy policy = level == 0 ? opt_.policy : ExecPolicy::serial;
    for_each_index(count, policy,
                   [&](long i) { nodes[i] = node_value(level, prefix, xs[i]); });
    std::vector<Segment> out;
    out.reserve(pieces.size());
    for (std::size_t s = 0; s < pieces.size(); ++s) {
      out.push_back(combine(pieces[s].lo, pieces[s].hi, nodes, s * kNodes));
    }
    for (const auto& n : nodes) {
      totals.evaluations += n.evaluations;
      if (!n.converged) totals.converged = false;
    }
    return out;
  }

  LevelResult integrate_level(int level, const std::vector<double>& prefix) {
    const int dim = p_.output_dim;
    LevelResult result;
    result.value.assign(dim, 0.0);
    result.error.assign(dim, 0.0);
    const Interval range = p_.limits(level, prefix);
    if (!(range.hi > range.lo)) return result;

    std::vector<Interval> initial;
    const int pieces = level == 0 ? std::max(1, opt_.initial_intervals) : 1;
    for (int i = 0; i < pieces; ++i) {
      const double a = range.lo + (range.hi - range.lo) * i / pieces;
      const double b = i + 1 == pieces
                           ? range.hi
                           : range.lo + (range.hi - range.lo) * (i + 1) / pieces;
      initial.push_back({a, b});
    }
    std::vector<Segment> segments = evaluate(level, prefix, initial, result);

    std::vector<double> resabs(dim, 0.0);
    while (true) {
      std::fill(result.value.begin(), result.value.end(), 0.0);
      std::fill(result.error.begin(), result.error.end(), 0.0);
      std::fill(resabs.begin(), resabs.end(), 0.0);
      for (const auto& s : segments) {
        for (int c = 0; c < dim; ++c) {
          result.value[c] += s.value[c];
          result.error[c] += s.error[c];
          resabs[c] += s.resabs[c];
        }
      }
      // Below the roundoff level of the node sums no refinement can help.
      const double roundoff =
          200.0 * std::numeric_limits<double>::epsilon() * scaled_norm(resabs);
      // Inner levels run tighter so their propagated errors leave room for
      // the outer rule.
      const double tighten = std::pow(kInnerTighten, level);
      const double target =
          std::max({tighten * opt_.abs_tol,
                    tighten * opt_.rel_tol * scaled_norm(result.value), roundoff});
      if (scaled_norm(result.error) <= target) break;
      if (static_cast<int>(segments.size()) >= opt_.max_intervals) {
        result.converged = false;
        break;
      }
      std::size_t worst = 0;
      for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].scaled_error > segments[worst].scaled_error) worst = i;
      }
      const double lo = segments[worst].lo;
      const double hi = segments[worst].hi;
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) {
        result.converged = false;
        break;
      }
      auto children = evaluate(level, prefix, {{lo, mid}, {mid, hi}}, result);
      segments[worst] = std::move(children[0]);
      segments.push_back(std::move(children[1]));
    }
    return result;
  }

  const NestedProblem& p_;
  CubatureOptions opt_;
  std::vector<double> scale_;
};

}  // namespace

CubatureResult integrate_nested(const NestedProblem& problem,
                                const CubatureOptions& options) {
  if (problem.dims < 1 || problem.output_dim < 1 || !problem.limits ||
      !problem.integrand) {
    throw Error(ErrorKind::precondition, "malformed cubature problem");
  }
  if (!problem.component_scale.empty() &&
      static_cast<int>(problem.component_scale.size()) != problem.output_dim) {
    throw Error(ErrorKind::precondition, "component_scale has wrong size");
  }
  NestedIntegrator integrator(problem, options);
  LevelResult r = integrator.run();
  return {std::move(r.value), std::move(r.error), r.evaluations, r.converged};
}

}  // namespace gmtlab
