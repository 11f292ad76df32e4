#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace periscope {

enum class ErrorCode {
  degenerate_normal,
  numerical_failure,
  domain_error,
  not_a_gradient,
  inversion_failure,
  singular_jacobian,
  domains_not_disjoint,
  image_not_convex,
  c_too_small,
  zero_displacement,
  inconsistent_system,
  piece_overlap,
  extension_violation,
  verification_failed,
  not_hyperbolic,
  radius_underflow,
  hessian_degenerate,
  singular_matrix,
  no_valid_shift,
  decomposition_failed,
  cell_too_large,
  shift_packing,
  precondition,
  placement_failure,
  geometric_inconsistency,
  trace_failure,
  parse_error,
  schema_error,
  io_error,
  invalid_argument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace periscope
