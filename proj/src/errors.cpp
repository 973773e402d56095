#include "gmtlab/errors.hpp"

namespace gmtlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::point_off_manifold:
      return "PointOffManifold";
    case ErrorKind::singular_point:
      return "SingularPoint";
    case ErrorKind::chart_radius_unavailable:
      return "ChartRadiusUnavailable";
    case ErrorKind::out_of_domain:
      return "OutOfDomain";
    case ErrorKind::chart_invariant:
      return "ChartInvariant";
    case ErrorKind::empty_intersection:
      return "EmptyIntersection";
    case ErrorKind::unknown_label:
      return "UnknownLabel";
    case ErrorKind::non_convergent:
      return "NonConvergent";
    case ErrorKind::precondition:
      return "Precondition";
    case ErrorKind::config:
      return "Config";
    case ErrorKind::io:
      return "IO";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind) {}

}  // namespace gmtlab
