#pragma once

#include "gmtlab/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gmtlab {

enum class ManifoldKind { plane, sphere, kp_cone, polynomial_graph };

const char* to_string(ManifoldKind kind) noexcept;

/// One term coeff * prod_i u_i^powers[i] of the graph component `component`.
struct Monomial {
  int component = 0;
  std::vector<int> powers;
  double coeff = 0.0;
};

/// Catalogued supports. Each kind lives in canonical coordinates and is then
/// placed by a rigid motion x = rotation * x_canonical + translation:
///   plane            R^k x {0}
///   sphere           |x_{1..k+1}| = rho, remaining coordinates zero
///   kp_cone          x_4^2 = x_1^2 + x_2^2 + x_3^2 in R^4 (vertex singular)
///   polynomial_graph x'' = phi(x'), phi polynomial in x' in R^k
class ManifoldDescriptor {
 public:
  static ManifoldDescriptor plane(int k, int ambient_dim);
  static ManifoldDescriptor sphere(int k, double rho, int ambient_dim = -1);
  static ManifoldDescriptor kp_cone();
  static ManifoldDescriptor polynomial_graph(int k, int ambient_dim,
                                             std::vector<Monomial> terms);

  /// The same manifold after applying x -> rotation * x + translation.
  ManifoldDescriptor placed(const Mat& rotation, const Vec& translation) const;
  /// The image under x -> factor * x.
  ManifoldDescriptor dilated(double factor) const;

  ManifoldKind kind() const { return kind_; }
  int k() const { return k_; }
  int ambient_dim() const { return ambient_dim_; }
  int codim() const { return ambient_dim_ - k_; }
  double rho() const { return rho_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  const Mat& rotation() const { return rotation_; }
  const Vec& translation() const { return translation_; }
  std::vector<Vec> singular_points() const;

  Vec to_canonical(const Vec& x) const;
  Vec to_ambient(const Vec& canonical) const;

  /// Distance-like residual of the defining equation; zero exactly on the set.
  double implicit_residual(const Vec& x) const;
  /// Exact nearest point for plane/sphere/cone; vertical projection for graphs.
  Vec project(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-10) const;

  /// Polynomial graph function and its derivatives (canonical coordinates).
  Vec graph_value(const Vec& u) const;
  Mat graph_gradient(const Vec& u) const;
  std::vector<Mat> graph_hessians(const Vec& u) const;

  std::string describe() const;

 private:
  ManifoldDescriptor() = default;

  ManifoldKind kind_ = ManifoldKind::plane;
  int k_ = 0;
  int ambient_dim_ = 0;
  double rho_ = 0.0;
  std::vector<Monomial> terms_;
  Mat rotation_;
  Vec translation_;
};

/// (phi, grad phi, hess phi) of a graph chart at one chart point. `gradient` is
/// codim x k; `hessians[j]` is the k x k Hessian of phi_j.
struct ChartJet {
  Vec value;
  Mat gradient;
  std::vector<Mat> hessians;
};

/// Local parametrization u -> origin + frame * (u, phi(u)) of a k-manifold,
/// re-centred and tangent-aligned: phi(0) = 0, grad phi(0) = 0. The first k
/// frame columns span the tangent space at the origin, the rest the normal
/// space.
class GraphChart {
 public:
  using JetFn = std::function<ChartJet(const Vec&)>;

  GraphChart(int k, int ambient_dim, double domain_radius, JetFn jet, Mat frame,
             Vec origin);

  int k() const { return k_; }
  int ambient_dim() const { return ambient_dim_; }
  int codim() const { return ambient_dim_ - k_; }
  double domain_radius() const { return domain_radius_; }
  const Mat& frame() const { return frame_; }
  const Vec& origin() const { return origin_; }
  Mat tangent_basis() const { return frame_.leftCols(k_); }
  Mat normal_basis() const { return frame_.rightCols(codim()); }

  /// Throws out_of_domain when |u| >= domain_radius.
  ChartJet jet(const Vec& u) const;
  Vec phi(const Vec& u) const { return jet(u).value; }
  /// Chart-frame coordinates (u, phi(u)) relative to the origin.
  Vec local_point(const Vec& u) const;
  Vec to_ambient(const Vec& u) const;

 private:
  int k_;
  int ambient_dim_;
  double domain_radius_;
  JetFn jet_;
  Mat frame_;
  Vec origin_;
};

struct CurvatureReport {
  Vec point;
  Vec mean_curvature;
  /// sff_eigenvalues[j] holds the eigenvalues of the j-th normal Hessian.
  std::vector<Vec> sff_eigenvalues;
  double norm_H = 0.0;
};

/// Curvature-limited chart radius used when the caller does not need more.
double safe_chart_radius(const ManifoldDescriptor& m, const Vec& z);

GraphChart graph_chart_at(const ManifoldDescriptor& m, const Vec& z,
                          double want_radius);

/// sqrt(det(I + grad phi^T grad phi)).
double area_element(const GraphChart& chart, const Vec& u);

/// H(0) = (1/k) frame * (0, laplacian phi(0)).
Vec mean_curvature_vector(const GraphChart& chart);

/// Normal Hessians at the chart origin, one symmetric k x k array per normal.
std::vector<Mat> second_fundamental_form(const GraphChart& chart);

/// Full trace formula (1/k) g^{ij} Pi_N(d_i d_j X) at chart point u, with all
/// derivatives of phi taken by central differences of step h. Used only as an
/// independent cross-check of `mean_curvature_vector`.
Vec mean_curvature_trace_formula(const GraphChart& chart, const Vec& u,
                                 double h = 1e-4);

CurvatureReport curvature_report(const GraphChart& chart);
CurvatureReport curvature_at(const ManifoldDescriptor& m, const Vec& z);

}  // namespace gmtlab
