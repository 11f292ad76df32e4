#pragma once

#include <Eigen/Dense>
#include <limits>

#include "periscope/error.hpp"

namespace periscope {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

/// Horizontal part (x1, x2) of a point in space.
inline Vec2 horizontal(const Vec3& p) { return {p.x(), p.y()}; }
inline Vec3 lift(const Vec2& x, double z) { return {x.x(), x.y(), z}; }

inline const Vec3 kUp{0.0, 0.0, 1.0};

/// Oriented line with a unit direction. Constructing normalizes the direction.
struct Ray {
  Vec3 origin;
  Vec3 direction;

  Ray(const Vec3& o, const Vec3& d);

  Vec3 at(double t) const { return origin + t * direction; }
};

/// Billiard reflection v' = v - 2<v,n> n / |n|^2. `n` need not be unit length.
Vec3 reflect(const Vec3& v, const Vec3& n);
Vec2 reflect(const Vec2& v, const Vec2& n);

/// Rise over horizontal run of the segment a -> b. Returns +/-infinity
/// (sign of the rise) for a vertical segment.
double segment_slope(const Vec3& a, const Vec3& b);

inline constexpr double kInfiniteSlope = std::numeric_limits<double>::infinity();

}  // namespace periscope
