#include "periscope/geometry.hpp"

#include <cmath>

namespace periscope {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::degenerate_normal: return "degenerate-normal";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::not_a_gradient: return "not-a-gradient";
    case ErrorCode::inversion_failure: return "inversion-failure";
    case ErrorCode::singular_jacobian: return "singular-jacobian";
    case ErrorCode::domains_not_disjoint: return "domains-not-disjoint";
    case ErrorCode::image_not_convex: return "image-not-convex";
    case ErrorCode::c_too_small: return "c-too-small";
    case ErrorCode::zero_displacement: return "zero-displacement";
    case ErrorCode::inconsistent_system: return "inconsistent-system";
    case ErrorCode::piece_overlap: return "piece-overlap";
    case ErrorCode::extension_violation: return "extension-violation";
    case ErrorCode::verification_failed: return "verification-failed";
    case ErrorCode::not_hyperbolic: return "not-hyperbolic";
    case ErrorCode::radius_underflow: return "radius-underflow";
    case ErrorCode::hessian_degenerate: return "hessian-degenerate";
    case ErrorCode::singular_matrix: return "singular-matrix";
    case ErrorCode::no_valid_shift: return "no-valid-shift";
    case ErrorCode::decomposition_failed: return "decomposition-failed";
    case ErrorCode::cell_too_large: return "cell-too-large";
    case ErrorCode::shift_packing: return "shift-packing";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::placement_failure: return "placement-failure";
    case ErrorCode::geometric_inconsistency: return "geometric-inconsistency";
    case ErrorCode::trace_failure: return "trace-failure";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::schema_error: return "schema-error";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

Ray::Ray(const Vec3& o, const Vec3& d) : origin(o), direction(d) {
  const double len = d.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorCode::invalid_argument, "ray direction must be a nonzero finite vector");
  }
  direction /= len;
}

namespace {

template <class V>
V reflect_impl(const V& v, const V& n) {
  const double nn = n.squaredNorm();
  if (!(nn > 0.0) || !std::isfinite(nn)) {
    throw Error(ErrorCode::degenerate_normal, "cannot reflect in a zero normal");
  }
  V out = v - (2.0 * v.dot(n) / nn) * n;
  // Keep |v'| = |v| exactly up to rounding of the renormalization.
  const double len = out.norm();
  const double want = v.norm();
  if (len > 0.0) out *= want / len;
  return out;
}

}  // namespace

Vec3 reflect(const Vec3& v, const Vec3& n) { return reflect_impl(v, n); }
Vec2 reflect(const Vec2& v, const Vec2& n) { return reflect_impl(v, n); }

double segment_slope(const Vec3& a, const Vec3& b) {
  const double run = (horizontal(b) - horizontal(a)).norm();
  const double rise = b.z() - a.z();
  if (run == 0.0) {
    return rise >= 0.0 ? kInfiniteSlope : -kInfiniteSlope;
  }
  return rise / run;
}

}  // namespace periscope
