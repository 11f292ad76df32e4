#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "periscope/field.hpp"
#include "periscope/plane_map.hpp"

namespace periscope {

/// Symmetric S1, S2 with S2 * S1 = F.
struct LinearFactors {
  Mat2 s1;
  Mat2 s2;
};

/// Exact factorization of a nonsingular matrix into two symmetric ones.
/// Symmetric F gives (F, I). Throws singular_matrix.
LinearFactors factor_linear(const Mat2& f);

enum class Hyperbolicity { hyperbolic, degenerate, elliptic };
std::string_view to_string(Hyperbolicity h);

/// Sign of (tr J)^2 - 4 det J, with |.| <= 1e-10 max(1, |J|^2) counted as degenerate.
Hyperbolicity hyperbolicity(const Mat2& jacobian);
Hyperbolicity hyperbolicity(const PlaneMap& f, const Vec2& x0);

/// Coefficients of A u_11 + B u_12 + C u_22 = 0, the condition that grad u o f
/// is curl free, as functions of the image point xi.
class PDECoefficients {
 public:
  /// `guess` seeds the inversion of f near f(guess).
  PDECoefficients(PlaneMap f, const Vec2& guess);
  /// From the Jacobian of f at the preimage point.
  static Eigen::Vector3d from_jacobian(const Mat2& j);

  Eigen::Vector3d at(const Vec2& xi) const;
  const PlaneMap& map() const { return f_; }

 private:
  PlaneMap f_;
  Vec2 guess_;
};

/// The two characteristic directions (unit vectors) of A u_11 + B u_12 + C u_22,
/// i.e. the null directions of A dy^2 - B dx dy + C dx^2. Throws not_hyperbolic.
std::pair<Vec2, Vec2> characteristic_directions(const Eigen::Vector3d& abc);

/// Slopes dy/dx of the two characteristic directions (infinite for vertical ones).
std::pair<double, double> characteristic_slopes(const Eigen::Vector3d& abc);

/// Characteristic curve of family 0 or 1 through xi0, traced for arc length
/// `length` (negative goes backwards) by step-doubling RK4.
std::vector<Vec2> integrate_characteristic(const PDECoefficients& coeffs, const Vec2& xi0, int family, double length,
                                           double tol = 1e-10);

struct DecomposeOptions {
  /// Residual bound on the curl deficit of grad u o f.
  double tolerance = 1e-8;
  /// Degree of the Taylor ansatz for u.
  int degree = 8;
  int max_halvings = 20;
  /// Starting radius; the default is 0.1 / (1 + |third derivatives of f|).
  std::optional<double> initial_radius;
  /// Refuse radii below this instead of halving further.
  std::optional<double> minimum_radius;
  int samples = 16;
};

struct DecompositionResult {
  /// grad phi = grad u o f on the disc B(center, radius).
  ScalarField phi;
  ScalarField u;
  Vec2 center;
  Vec2 image_center;
  double radius = 0.0;
  double residual = 0.0;
  double hessian_condition = 0.0;
  int degree = 0;

  /// grad u, as a map on f(B).
  PlaneMap grad_u(const Domain& source) const;
  nlohmann::json to_json() const;
};

/// Local factorization f = (grad u)^-1 o grad phi near x0 for hyperbolic points.
/// Throws not_hyperbolic, radius_underflow or hessian_degenerate.
DecompositionResult decompose_local(const PlaneMap& f, const Vec2& x0, const DecomposeOptions& opts = {});

}  // namespace periscope
