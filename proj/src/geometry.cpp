#include "gmtlab/geometry.hpp"

#include "gmtlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace gmtlab {

namespace {

constexpr double kOnManifoldTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double x, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= x;
  return out;
}

// d^{a+b} / du_i^a du_j^b of prod_m u_m^{p_m}, for derivative orders up to two.
double monomial_derivative(const std::vector<int>& powers, const Vec& u, int i,
                           int j) {
  std::vector<int> p = powers;
  double factor = 1.0;
  for (int idx : {i, j}) {
    if (idx < 0) continue;
    if (p[idx] == 0) return 0.0;
    factor *= p[idx];
    --p[idx];
  }
  for (std::size_t m = 0; m < p.size(); ++m) factor *= ipow(u[m], p[m]);
  return factor;
}

// Local graph description x'' = psi(v) in canonical coordinates, used to build
// tangent-aligned charts by re-parametrization over the tangent plane.
struct CanonicalGraph {
  int k;
  int ambient_dim;
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> gradient;
  std::function<std::vector<Mat>(const Vec&)> hessians;

  Vec point(const Vec& v) const {
    Vec x(ambient_dim);
    x.head(k) = v;
    x.tail(ambient_dim - k) = value(v);
    return x;
  }
  Mat differential(const Vec& v) const {
    Mat d = Mat::Zero(ambient_dim, k);
    d.topRows(k).setIdentity();
    d.bottomRows(ambient_dim - k) = gradient(v);
    return d;
  }
};

// Builds the chart of the graph `g` at canonical parameter v_z. The jet of the
// re-parametrized graph follows from differentiating T^T (X(v(u)) - z) = u
// twice: grad phi = B A^{-1}, hess phi_m = sum_c P_mc J^T hess X_c J with
// A = T^T DX, B = N^T DX, J = A^{-1}, P = N^T - grad phi T^T.
GraphChart reparametrized_chart(const CanonicalGraph& g, const Vec& v_z,
                                const Mat& rotation, const Vec& translation,
                                double domain_radius) {
  const int k = g.k;
  const int n1 = g.ambient_dim;
  const Vec z = g.point(v_z);
  const Mat tangent = orthonormalize_columns(g.differential(v_z));
  const Mat normal = orthonormal_complement(tangent, k);
  const Mat a0_inv = (tangent.transpose() * g.differential(v_z)).inverse();

  auto jet = [g, v_z, z, tangent, normal, a0_inv, k, n1](const Vec& u) {
    Vec v = v_z + a0_inv * u;
    Mat dx = g.differential(v);
    Mat a = tangent.transpose() * dx;
    const double scale = 1.0 + u.norm();
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const Vec residual = tangent.transpose() * (g.point(v) - z) - u;
      if (residual.norm() <= 1e-15 * scale) {
        converged = true;
        break;
      }
      v -= a.partialPivLu().solve(residual);
      dx = g.differential(v);
      a = tangent.transpose() * dx;
    }
    if (!converged) {
      const Vec residual = tangent.transpose() * (g.point(v) - z) - u;
      if (residual.norm() > 1e-12 * scale) {
        throw Error(ErrorKind::out_of_domain,
                    "chart inversion failed to converge");
      }
    }
    const Mat j = a.inverse();
    ChartJet out;
    out.value = normal.transpose() * (g.point(v) - z);
    out.gradient = normal.transpose() * dx * j;
    const Mat projector =
        normal.transpose() - out.gradient * tangent.transpose();
    const std::vector<Mat> psi_hess = g.hessians(v);
    out.hessians.assign(n1 - k, Mat::Zero(k, k));
    for (int c = k; c < n1; ++c) {
      const Mat pulled = j.transpose() * psi_hess[c - k] * j;
      for (int m = 0; m < n1 - k; ++m) out.hessians[m] += projector(m, c) * pulled;
    }
    for (auto& h : out.hessians) h = 0.5 * (h + h.transpose());
    return out;
  };

  Mat frame(n1, n1);
  frame << tangent, normal;
  return GraphChart(k, n1, domain_radius, std::move(jet), rotation * frame,
                    rotation * z + translation);
}

double max_hessian_norm(const std::vector<Mat>& hessians) {
  double out = 0.0;
  for (const auto& h : hessians) {
    if (h.size() == 0) continue;
    out = std::max(out, h.operatorNorm());
  }
  return out;
}

}  // namespace

const char* to_string(ManifoldKind kind) noexcept {
  switch (kind) {
    case ManifoldKind::plane:
      return "plane";
    case ManifoldKind::sphere:
      return "sphere";
    case ManifoldKind::kp_cone:
      return "kp_cone";
    case ManifoldKind::polynomial_graph:
      return "polynomial_graph";
  }
  return "unknown";
}

ManifoldDescriptor ManifoldDescriptor::plane(int k, int ambient_dim) {
  if (k < 1 || ambient_dim <= k) {
    throw Error(ErrorKind::precondition, "plane requires 1 <= k < ambient_dim");
  }
  ManifoldDescriptor m;
  m.kind_ = ManifoldKind::plane;
  m.k_ = k;
  m.ambient_dim_ = ambient_dim;
  m.rotation_ = Mat::Identity(ambient_dim, ambient_dim);
  m.translation_ = Vec::Zero(ambient_dim);
  return m;
}

ManifoldDescriptor ManifoldDescriptor::sphere(int k, double rho,
                                              int ambient_dim) {
  if (ambient_dim < 0) ambient_dim = k + 1;
  if (k < 1 || ambient_dim < k + 1) {
    throw Error(ErrorKind::precondition,
                "sphere requires 1 <= k and ambient_dim >= k + 1");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorKind::precondition, "sphere radius must be positive");
  }
  ManifoldDescriptor m;
  m.kind_ = ManifoldKind::sphere;
  m.k_ = k;
  m.ambient_dim_ = ambient_dim;
  m.rho_ = rho;
  m.rotation_ = Mat::Identity(ambient_dim, ambient_dim);
  m.translation_ = Vec::Zero(ambient_dim);
  return m;
}

ManifoldDescriptor ManifoldDescriptor::kp_cone() {
  ManifoldDescriptor m;
  m.kind_ = ManifoldKind::kp_cone;
  m.k_ = 3;
  m.ambient_dim_ = 4;
  m.rotation_ = Mat::Identity(4, 4);
  m.translation_ = Vec::Zero(4);
  return m;
}

ManifoldDescriptor ManifoldDescriptor::polynomial_graph(
    int k, int ambient_dim, std::vector<Monomial> terms) {
  if (k < 1 || ambient_dim <= k) {
    throw Error(ErrorKind::precondition,
                "polynomial graph requires 1 <= k < ambient_dim");
  }
  for (const auto& t : terms) {
    if (t.component < 0 || t.component >= ambient_dim - k ||
        static_cast<int>(t.powers.size()) != k ||
        std::any_of(t.powers.begin(), t.powers.end(),
                    [](int p) { return p < 0; })) {
      throw Error(ErrorKind::precondition, "malformed polynomial term");
    }
  }
  ManifoldDescriptor m;
  m.kind_ = ManifoldKind::polynomial_graph;
  m.k_ = k;
  m.ambient_dim_ = ambient_dim;
  m.terms_ = std::move(terms);
  m.rotation_ = Mat::Identity(ambient_dim, ambient_dim);
  m.translation_ = Vec::Zero(ambient_dim);
  return m;
}

ManifoldDescriptor ManifoldDescriptor::placed(const Mat& rotation,
                                              const Vec& translation) const {
  if (rotation.rows() != ambient_dim_ || rotation.cols() != ambient_dim_ ||
      translation.size() != ambient_dim_) {
    throw Error(ErrorKind::precondition, "placement has wrong dimensions");
  }
  const Mat gram = rotation.transpose() * rotation;
  if ((gram - Mat::Identity(ambient_dim_, ambient_dim_)).cwiseAbs().maxCoeff() >
      1e-12) {
    throw Error(ErrorKind::precondition, "placement rotation is not orthogonal");
  }
  ManifoldDescriptor m = *this;
  m.rotation_ = rotation * rotation_;
  m.translation_ = rotation * translation_ + translation;
  return m;
}

ManifoldDescriptor ManifoldDescriptor::dilated(double factor) const {
  if (!(factor > 0.0)) {
    throw Error(ErrorKind::precondition, "dilation factor must be positive");
  }
  ManifoldDescriptor m = *this;
  m.translation_ *= factor;
  m.rho_ *= factor;
  for (auto& t : m.terms_) {
    int degree = 0;
    for (int p : t.powers) degree += p;
    // lambda * phi(v / lambda)
    t.coeff *= std::pow(factor, 1 - degree);
  }
  return m;
}

std::vector<Vec> ManifoldDescriptor::singular_points() const {
  if (kind_ == ManifoldKind::kp_cone) return {translation_};
  return {};
}

Vec ManifoldDescriptor::to_canonical(const Vec& x) const {
  return rotation_.transpose() * (x - translation_);
}

Vec ManifoldDescriptor::to_ambient(const Vec& canonical) const {
  return rotation_ * canonical + translation_;
}

Vec ManifoldDescriptor::graph_value(const Vec& u) const {
  Vec out = Vec::Zero(codim());
  for (const auto& t : terms_) {
    out[t.component] += t.coeff * monomial_derivative(t.powers, u, -1, -1);
  }
  return out;
}

Mat ManifoldDescriptor::graph_gradient(const Vec& u) const {
  Mat out = Mat::Zero(codim(), k_);
  for (const auto& t : terms_) {
    for (int i = 0; i < k_; ++i) {
      out(t.component, i) += t.coeff * monomial_derivative(t.powers, u, i, -1);
    }
  }
  return out;
}

std::vector<Mat> ManifoldDescriptor::graph_hessians(const Vec& u) const {
  std::vector<Mat> out(codim(), Mat::Zero(k_, k_));
  for (const auto& t : terms_) {
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) {
        out[t.component](i, j) +=
            t.coeff * monomial_derivative(t.powers, u, i, j);
      }
    }
  }
  return out;
}

double ManifoldDescriptor::implicit_residual(const Vec& x) const {
  if (x.size() != ambient_dim_) {
    throw Error(ErrorKind::precondition, "point has wrong ambient dimension");
  }
  const Vec c = to_canonical(x);
  switch (kind_) {
    case ManifoldKind::plane:
      return c.tail(codim()).norm();
    case ManifoldKind::sphere: {
      const double radial = std::abs(c.head(k_ + 1).norm() - rho_);
      const int extra = ambient_dim_ - k_ - 1;
      return extra > 0 ? std::hypot(radial, c.tail(extra).norm()) : radial;
    }
    case ManifoldKind::kp_cone:
      return std::abs(c.head(3).norm() - std::abs(c[3])) / std::sqrt(2.0);
    case ManifoldKind::polynomial_graph:
      return (c.tail(codim()) - graph_value(c.head(k_))).norm();
  }
  return kInf;
}

Vec ManifoldDescriptor::project(const Vec& x) const {
  Vec c = to_canonical(x);
  switch (kind_) {
    case ManifoldKind::plane:
      c.tail(codim()).setZero();
      break;
    case ManifoldKind::sphere: {
      const double norm = c.head(k_ + 1).norm();
      if (norm == 0.0) {
        c.head(k_ + 1).setZero();
        c[k_] = -rho_;
      } else {
        c.head(k_ + 1) *= rho_ / norm;
      }
      if (ambient_dim_ > k_ + 1) c.tail(ambient_dim_ - k_ - 1).setZero();
      break;
    }
    case ManifoldKind::kp_cone: {
      const double radial = c.head(3).norm();
      const double sign = c[3] < 0.0 ? -1.0 : 1.0;
      const double s = std::max(0.0, 0.5 * (radial + sign * c[3]));
      Vec dir = radial > 0.0 ? Vec(c.head(3) / radial) : Vec(Vec::Unit(3, 0));
      c.head(3) = s * dir;
      c[3] = sign * s;
      break;
    }
    case ManifoldKind::polynomial_graph:
      c.tail(codim()) = graph_value(c.head(k_));
      break;
  }
  return to_ambient(c);
}

bool ManifoldDescriptor::contains(const Vec& x, double tol) const {
  return implicit_residual(x) <= tol;
}

std::string ManifoldDescriptor::describe() const {
  switch (kind_) {
    case ManifoldKind::plane:
      return fmt::format("plane(k={}, n+1={})", k_, ambient_dim_);
    case ManifoldKind::sphere:
      return fmt::format("sphere(k={}, rho={}, n+1={})", k_, rho_, ambient_dim_);
    case ManifoldKind::kp_cone:
      return "kp_cone";
    case ManifoldKind::polynomial_graph:
      return fmt::format("polynomial_graph(k={}, n+1={}, terms={})", k_,
                         ambient_dim_, terms_.size());
  }
  return "unknown";
}

GraphChart::GraphChart(int k, int ambient_dim, double domain_radius, JetFn jet,
                       Mat frame, Vec origin)
    : k_(k),
      ambient_dim_(ambient_dim),
      domain_radius_(domain_radius),
      jet_(std::move(jet)),
      frame_(std::move(frame)),
      origin_(std::move(origin)) {
  if (k_ < 1 || ambient_dim_ <= k_ || !(domain_radius_ > 0.0)) {
    throw Error(ErrorKind::chart_invariant, "invalid chart dimensions");
  }
  const Mat gram = frame_.transpose() * frame_;
  if ((gram - Mat::Identity(ambient_dim_, ambient_dim_)).cwiseAbs().maxCoeff() >
      1e-12) {
    throw Error(ErrorKind::chart_invariant, "chart frame is not orthogonal");
  }
  const ChartJet at_origin = jet_(Vec::Zero(k_));
  if (at_origin.value.cwiseAbs().maxCoeff() > 1e-12 ||
      at_origin.gradient.cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::chart_invariant,
                "chart is not centred and tangent-aligned");
  }
  for (const auto& h : at_origin.hessians) {
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw Error(ErrorKind::chart_invariant, "chart Hessian is not symmetric");
    }
  }
}

ChartJet GraphChart::jet(const Vec& u) const {
  if (u.size() != k_ || !(u.norm() < domain_radius_)) {
    throw Error(ErrorKind::out_of_domain,
                fmt::format("chart point |u|={} outside domain radius {}",
                            u.norm(), domain_radius_));
  }
  return jet_(u);
}

Vec GraphChart::local_point(const Vec& u) const {
  Vec local(ambient_dim_);
  local.head(k_) = u;
  local.tail(codim()) = phi(u);
  return local;
}

Vec GraphChart::to_ambient(const Vec& u) const {
  return origin_ + frame_ * local_point(u);
}

double safe_chart_radius(const ManifoldDescriptor& m, const Vec& z) {
  switch (m.kind()) {
    case ManifoldKind::plane:
      return kInf;
    case ManifoldKind::sphere:
      return 0.9 * m.rho();
    case ManifoldKind::kp_cone:
      return 0.45 * (z - m.translation()).norm();
    case ManifoldKind::polynomial_graph: {
      const Vec c = m.to_canonical(z);
      const double curvature = max_hessian_norm(m.graph_hessians(c.head(m.k())));
      return curvature > 0.0 ? 0.45 / curvature : kInf;
    }
  }
  return 0.0;
}

GraphChart graph_chart_at(const ManifoldDescriptor& m, const Vec& z,
                          double want_radius) {
  if (!(want_radius > 0.0)) {
    throw Error(ErrorKind::precondition, "chart radius must be positive");
  }
  if (z.size() != m.ambient_dim() || !m.contains(z, kOnManifoldTol)) {
    throw Error(ErrorKind::point_off_manifold,
                fmt::format("point is not on {}", m.describe()));
  }
  for (const auto& s : m.singular_points()) {
    if ((z - s).norm() <= kOnManifoldTol) {
      throw Error(ErrorKind::singular_point,
                  fmt::format("{} is not C^2 at the requested point",
                              m.describe()));
    }
  }
  const int k = m.k();
  const int n1 = m.ambient_dim();
  const double safe = safe_chart_radius(m, z);
  const double radius = std::min(want_radius, safe);
  const Vec c = m.to_canonical(m.project(z));

  switch (m.kind()) {
    case ManifoldKind::plane: {
      auto jet = [k, n1](const Vec&) {
        return ChartJet{Vec::Zero(n1 - k), Mat::Zero(n1 - k, k),
                        std::vector<Mat>(n1 - k, Mat::Zero(k, k))};
      };
      return GraphChart(k, n1, radius, jet, m.rotation(), m.to_ambient(c));
    }
    case ManifoldKind::sphere: {
      const double rho = m.rho();
      if (want_radius >= rho) {
        throw Error(ErrorKind::chart_radius_unavailable,
                    fmt::format("a sphere of radius {} is not a graph over a "
                                "tangent disk of radius {}",
                                rho, want_radius));
      }
      const Vec nu = c.head(k + 1) / rho;
      Mat frame = Mat::Zero(n1, n1);
      frame.block(0, 0, k + 1, k) = orthonormal_complement(Mat(nu), 0);
      frame.block(0, k, k + 1, 1) = -nu;
      for (int e = k + 1; e < n1; ++e) frame(e, e) = 1.0;
      auto jet = [k, n1, rho](const Vec& u) {
        const double s = rho * rho - u.squaredNorm();
        const double root = std::sqrt(s);
        ChartJet out{Vec::Zero(n1 - k), Mat::Zero(n1 - k, k),
                     std::vector<Mat>(n1 - k, Mat::Zero(k, k))};
        // rho - sqrt(rho^2 - |u|^2), written to avoid cancellation near 0.
        out.value[0] = u.squaredNorm() / (rho + root);
        out.gradient.row(0) = u.transpose() / root;
        out.hessians[0] = Mat::Identity(k, k) / root + u * u.transpose() / (s * root);
        return out;
      };
      return GraphChart(k, n1, radius, jet, m.rotation() * frame,
                        m.to_ambient(c));
    }
    case ManifoldKind::kp_cone: {
      const double vertex_distance = (z - m.translation()).norm();
      if (want_radius >= vertex_distance) {
        throw Error(ErrorKind::chart_radius_unavailable,
                    "requested chart reaches the cone vertex");
      }
      const double sign = c[3] < 0.0 ? -1.0 : 1.0;
      CanonicalGraph g{
          3, 4,
          [sign](const Vec& v) { return Vec::Constant(1, sign * v.norm()); },
          [sign](const Vec& v) {
            return Mat(sign * v.transpose() / v.norm());
          },
          [sign](const Vec& v) {
            const double r = v.norm();
            const Vec dir = v / r;
            return std::vector<Mat>{
                sign * (Mat::Identity(3, 3) - dir * dir.transpose()) / r};
          }};
      return reparametrized_chart(g, c.head(3), m.rotation(), m.translation(),
                                  radius);
    }
    case ManifoldKind::polynomial_graph: {
      CanonicalGraph g{k, n1,
                       [m](const Vec& v) { return m.graph_value(v); },
                       [m](const Vec& v) { return m.graph_gradient(v); },
                       [m](const Vec& v) { return m.graph_hessians(v); }};
      return reparametrized_chart(g, c.head(k), m.rotation(), m.translation(),
                                  radius);
    }
  }
  throw Error(ErrorKind::precondition, "unsupported manifold kind");
}

double area_element(const GraphChart& chart, const Vec& u) {
  const Mat grad = chart.jet(u).gradient;
  const Mat metric =
      Mat::Identity(chart.k(), chart.k()) + grad.transpose() * grad;
  return std::sqrt(metric.determinant());
}

Vec mean_curvature_vector(const GraphChart& chart) {
  const ChartJet j = chart.jet(Vec::Zero(chart.k()));
  Vec laplacian(chart.codim());
  for (int m = 0; m < chart.codim(); ++m) laplacian[m] = j.hessians[m].trace();
  return chart.normal_basis() * laplacian / static_cast<double>(chart.k());
}

std::vector<Mat> second_fundamental_form(const GraphChart& chart) {
  return chart.jet(Vec::Zero(chart.k())).hessians;
}

Vec mean_curvature_trace_formula(const GraphChart& chart, const Vec& u,
                                 double h) {
  const int k = chart.k();
  const int n1 = chart.ambient_dim();
  const int cd = chart.codim();
  auto phi = [&](const Vec& p) { return chart.phi(p); };
  auto unit = [k](int i) { return Vec(Vec::Unit(k, i)); };

  Mat tangents = Mat::Zero(n1, k);
  for (int i = 0; i < k; ++i) {
    tangents(i, i) = 1.0;
    tangents.col(i).tail(cd) =
        (phi(u + h * unit(i)) - phi(u - h * unit(i))) / (2.0 * h);
  }
  const Vec center = phi(u);
  std::vector<std::vector<Vec>> second(k, std::vector<Vec>(k));
  for (int i = 0; i < k; ++i) {
    second[i][i] = (phi(u + h * unit(i)) - 2.0 * center + phi(u - h * unit(i))) /
                   (h * h);
    for (int j = i + 1; j < k; ++j) {
      const Vec ei = h * unit(i);
      const Vec ej = h * unit(j);
      second[i][j] = (phi(u + ei + ej) - phi(u + ei - ej) - phi(u - ei + ej) +
                      phi(u - ei - ej)) /
                     (4.0 * h * h);
      second[j][i] = second[i][j];
    }
  }
  const Mat metric = tangents.transpose() * tangents;
  const Mat inverse_metric = metric.inverse();
  const Mat normal_projector =
      Mat::Identity(n1, n1) - tangents * inverse_metric * tangents.transpose();
  Vec local = Vec::Zero(n1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      Vec d2 = Vec::Zero(n1);
      d2.tail(cd) = second[i][j];
      local += inverse_metric(i, j) * (normal_projector * d2);
    }
  }
  return chart.frame() * local / static_cast<double>(k);
}

CurvatureReport curvature_report(const GraphChart& chart) {
  CurvatureReport report;
  report.point = chart.origin();
  report.mean_curvature = mean_curvature_vector(chart);
  report.norm_H = report.mean_curvature.norm();
  for (const auto& h : second_fundamental_form(chart)) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(h, Eigen::EigenvaluesOnly);
    report.sff_eigenvalues.push_back(solver.eigenvalues());
  }
  return report;
}

CurvatureReport curvature_at(const ManifoldDescriptor& m, const Vec& z) {
  const double radius = std::min(0.1, 0.5 * safe_chart_radius(m, z));
  return curvature_report(graph_chart_at(m, z, radius));
}

}  // namespace gmtlab
