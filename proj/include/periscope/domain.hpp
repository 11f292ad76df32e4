#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "periscope/geometry.hpp"

namespace periscope {

class PlaneMap;

struct Box {
  Vec2 lo;
  Vec2 hi;

  Vec2 center() const { return 0.5 * (lo + hi); }
  Vec2 extent() const { return hi - lo; }
  double diameter() const { return (hi - lo).norm(); }
  bool empty() const { return lo.x() > hi.x() || lo.y() > hi.y(); }
};

/// Planar region used as the base of mirror patches and beam cross-sections.
///
/// Kinds: an interval [a, b] on the x1 axis (beam dimension 1), a disc, a
/// convex polygon (counterclockwise), the image of another domain under a
/// map (membership by inverting the map), an intersection or a union.
class Domain {
 public:
  enum class Kind { interval, disc, polygon, mapped, intersection, union_of };

  Domain();  // unit disc at the origin

  static Domain interval(double a, double b);
  static Domain disc(const Vec2& center, double radius);
  static Domain polygon(std::vector<Vec2> vertices);
  static Domain rectangle(const Vec2& lo, const Vec2& hi);
  static Domain mapped(const Domain& base, const PlaneMap& forward);
  static Domain intersection(std::vector<Domain> parts);
  /// Union of pieces; its outline is the concatenation of the pieces' outlines.
  static Domain union_of(std::vector<Domain> parts);

  Kind kind() const;
  int dimension() const;

  /// Closed membership with absolute slack `tol`; a negative `tol` asks for
  /// points at least |tol| inside.
  bool contains(const Vec2& p, double tol) const;
  bool contains(const Vec2& p) const { return contains(p, default_tolerance()); }

  Box bounds() const;
  Vec2 center() const;
  double diameter() const { return bounds().diameter(); }
  /// Length scale used for relative tolerances, at least 1.
  double scale() const;
  double default_tolerance() const { return 1e-9 * scale(); }

  /// Counterclockwise boundary polyline with roughly `n` vertices (exact
  /// vertices for polygons; two points for intervals).
  std::vector<Vec2> outline(int n = 256) const;
  /// Polygon corners plus edge midpoints, or evenly spaced boundary points.
  std::vector<Vec2> boundary_points(int n = 16) const;

  /// Parameter range [t0, t1] over which o + t d stays inside a conservative
  /// superset of the domain; nullopt when the line misses it.
  std::optional<std::pair<double, double>> clip(const Vec2& o, const Vec2& d) const;

  /// True when the outline turns one way only (exact for discs/polygons).
  bool is_convex(double tol = 1e-9) const;

  /// Only meaningful for kind() == disc / polygon / interval / mapped / intersection.
  Vec2 disc_center() const;
  double disc_radius() const;
  const std::vector<Vec2>& vertices() const;
  const Domain& base() const;
  const PlaneMap& forward() const;
  const std::vector<Domain>& parts() const;

  nlohmann::json to_json() const;
  static Domain from_json(const nlohmann::json& j);

  struct Impl;

 private:
  explicit Domain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Interiors disjoint (touching boundaries allowed). Exact for intervals,
/// discs and polygons; otherwise outline separation plus interior sampling.
bool interiors_disjoint(const Domain& a, const Domain& b);

/// Deterministic low-discrepancy interior points (Halton bases 2 and 3).
std::vector<Vec2> halton_points(const Domain& d, int count, int skip = 1);

double radical_inverse(unsigned index, unsigned base);

}  // namespace periscope
