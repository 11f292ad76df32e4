#pragma once

#include "periscope/domain.hpp"
#include "periscope/field.hpp"
#include "periscope/plane_map.hpp"

namespace periscope {

/// Max over a samples x samples grid of |dg1/dx2 - dg2/dx1|, g = m - id.
/// Throws domain_error when `region` is not inside m.source().
double curl_deficit(const PlaneMap& m, const Domain& region, int samples = 32);

/// G with G(base) = 0 and grad G = m. Throws not_a_gradient when the curl
/// deficit of m over its source exceeds `tolerance`.
ScalarField potential_from_gradient(const PlaneMap& m, const Vec2& base, double tolerance = 1e-8);

struct InvertOptions {
  int max_iterations = 50;
  double relative_tolerance = 1e-11;
};

/// Damped Newton solve of m(x) = y. Throws inversion_failure or singular_jacobian.
Vec2 invert_map(const PlaneMap& m, const Vec2& y, const Vec2& guess, const InvertOptions& opts = {});

enum class Orientation { reversing, preserving, mixed };
std::string_view to_string(Orientation o);

/// Sign of det J on a samples x samples grid over region.
Orientation orientation(const PlaneMap& m, const Domain& region, int samples = 64);

/// det J sign constancy plus pairwise image separation on a grid.
bool is_sampled_diffeomorphism(const PlaneMap& m, const Domain& region, int samples = 24);

/// Regular grid points of the region's bounding box that lie in the region.
std::vector<Vec2> grid_points(const Domain& region, int samples);

/// Sup of |m(x)| over grid and boundary samples of region.
double sampled_sup_norm(const PlaneMap& m, const Domain& region, int samples = 64);

}  // namespace periscope
