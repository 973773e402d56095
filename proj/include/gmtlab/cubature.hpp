#pragma once

#include "gmtlab/parallel.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gmtlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Iterated integral over a region whose level-`l` limits may depend on the
/// coordinates of levels [0, l):
///   int_{lo_0}^{hi_0} ... int_{lo_{d-1}(x_0..x_{d-2})}^{hi_{d-1}(...)} f(x) dx.
/// The integrand writes `output_dim` components and must be safe to call
/// concurrently.
struct NestedProblem {
  int dims = 1;
  int output_dim = 1;
  std::function<Interval(int level, std::span<const double> outer)> limits;
  std::function<void(std::span<const double> coords, std::span<double> out)>
      integrand;
  /// Typical magnitude of each component; error control is applied to the
  /// scaled vector value / scale in the max norm. Empty means all ones.
  std::vector<double> component_scale;
};

struct CubatureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_intervals = 400;
  /// Number of equal pieces the outermost interval starts with.
  int initial_intervals = 4;
  ExecPolicy policy = ExecPolicy::parallel;
};

struct CubatureResult {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Nested globally-adaptive Gauss-Kronrod (7/15) quadrature. Errors of inner
/// integrals are propagated into the outer estimate. The parallel policy
/// evaluates outermost nodes concurrently; summation order is fixed, so both
/// policies return bitwise-identical results.
CubatureResult integrate_nested(const NestedProblem& problem,
                                const CubatureOptions& options);

}  // namespace gmtlab
