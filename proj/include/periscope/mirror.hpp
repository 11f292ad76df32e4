#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "periscope/domain.hpp"
#include "periscope/field.hpp"
#include "periscope/geometry.hpp"

namespace periscope {

/// Mirror surface z = height(x) over base_domain.
class MirrorPatch {
 public:
  MirrorPatch(Domain base_domain, ScalarField height, std::string id);

  const Domain& base_domain() const { return domain_; }
  const ScalarField& height() const { return height_; }
  const std::string& id() const { return id_; }

  /// 1.5 x the sampled sup of |grad height|.
  double lipschitz() const { return lipschitz_; }
  /// Height range with a margin covering values between samples.
  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }

  /// Upward unit normal (-grad, 1) / |(-grad, 1)| at horizontal point x.
  Vec3 normal(const Vec2& x) const;

  MirrorPatch translated(double dz) const;
  /// The reflection of the patch in the plane z = 0.
  MirrorPatch z_mirrored() const;
  MirrorPatch renamed(std::string id) const;

 private:
  MirrorPatch() = default;

  Domain domain_;
  ScalarField height_;
  std::string id_;
  double lipschitz_ = 0.0;
  double z_min_ = 0.0;
  double z_max_ = 0.0;
};

/// Ordered mirrors realizing a map of vertical beams from entry_domain to exit_domain.
struct MirrorSystem {
  std::vector<MirrorPatch> patches;
  int expected_reflections = 0;
  /// The c of the system, or one value per piece.
  std::vector<double> path_constants;
  Domain entry_domain;
  Domain exit_domain;
  nlohmann::json metadata = nlohmann::json::object();

  int dimension() const { return entry_domain.dimension(); }
  double z_min() const;
  double z_max() const;
  /// Diagonal of the 3D bounding box of all patches (>= 1).
  double diameter() const;

  MirrorSystem translated(double dz) const;
  /// Mirror image in z = 0 with the patch order and entry/exit reversed.
  MirrorSystem z_mirrored() const;
};

struct PatchHit {
  double t;
  Vec3 point;
  Vec3 normal;
};

struct PatchHit2 {
  double t;
  Vec2 point;
  Vec2 normal;
};

/// Smallest t > t_min where the ray meets the graph over the base domain.
/// Throws numerical_failure when refinement of a bracketed root fails.
std::optional<PatchHit> intersect_ray_patch(const Ray& ray, const MirrorPatch& patch, double t_min);

/// The same in the vertical plane (x, z) for one-dimensional patches.
std::optional<PatchHit2> intersect_ray_patch(const Vec2& origin, const Vec2& direction, const MirrorPatch& patch,
                                              double t_min);

}  // namespace periscope
