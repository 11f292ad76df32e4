#pragma once

#include <vector>

#include "periscope/geometry.hpp"

namespace periscope {

/// Ellipse with foci (-c, 0), (c, 0) and |AC| + |CB| = 2, so 0 <= c < 1.
struct EllipseConfig {
  double c = 0.0;

  EllipseConfig() = default;
  explicit EllipseConfig(double focal);  // throws invalid_argument outside [0, 1)

  Vec2 focus_a() const { return {-c, 0.0}; }
  Vec2 focus_b() const { return {c, 0.0}; }
  /// Product tan(alpha / 2) tan(beta / 2) of the pencil map.
  double mobius_coefficient() const { return (1.0 - c) / (1.0 + c); }
};

/// Angle at B of the reflected ray for the ray leaving A at angle alpha
/// (both measured inside triangle ABC). Closed form through the half-angle
/// tangents; alpha = 0 and pi map to pi and 0.
double pencil_map_angle(const EllipseConfig& cfg, double alpha);

/// |sin(a + b) - c (sin a + sin b)|.
double sines_residual(const EllipseConfig& cfg, double alpha, double beta);

/// Point C on the ellipse hit by the ray from A at angle alpha.
Vec2 ellipse_point(const EllipseConfig& cfg, double alpha);

/// The same angle by reflecting the ray in the tangent at C. Throws
/// geometric_inconsistency when the reflected ray misses B by more than 1e-10.
double pencil_map_geometric(const EllipseConfig& cfg, double alpha);

struct MobiusFit {
  double coefficient = 0.0;    // mean of tan(alpha / 2) tan(beta / 2)
  double expected = 0.0;       // (1 - c) / (1 + c)
  double max_deviation = 0.0;  // from expected
};

/// Over alpha_k = pi (k + 1/2) / samples. Throws invalid_argument for samples < 3.
MobiusFit mobius_fit(const EllipseConfig& cfg, int samples);

struct PencilRow {
  double alpha;
  double beta;
  double xy;
};

std::vector<PencilRow> pencil_table(const EllipseConfig& cfg, int samples);

}  // namespace periscope
