#pragma once

#include <stdexcept>
#include <string>

namespace gmtlab {

enum class ErrorKind {
  point_off_manifold,
  singular_point,
  chart_radius_unavailable,
  out_of_domain,
  chart_invariant,
  empty_intersection,
  unknown_label,
  non_convergent,
  precondition,
  config,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every recoverable failure in the library is reported as an `Error` carrying
/// a machine-checkable kind; callers branch on `kind()`, not on the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gmtlab
