#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "periscope/mirror.hpp"
#include "periscope/plane_map.hpp"

namespace periscope {

enum class TraceStatus { ok, escaped, superfluous, max_bounces };
std::string_view to_string(TraceStatus s);

struct SuperfluousHit {
  std::string patch_id;
  Vec3 point;
};

struct TraceResult {
  Vec2 entry_label = Vec2::Zero();
  /// Reflection points A1, A2, ...
  std::vector<Vec3> vertices;
  /// Index into system.patches of each vertex.
  std::vector<int> patch_indices;
  Vec2 exit_label = Vec2::Zero();
  Vec3 exit_direction = kUp;
  /// Optical path between z_floor and z_ceil minus their distance.
  double path_length_shift = 0.0;
  std::vector<SuperfluousHit> superfluous_hits;
  TraceStatus status = TraceStatus::escaped;
  /// Set by verify_system when a failed trace touches, within 1e-7 scale, an
  /// edge where two different patch domains meet.
  bool boundary_ambiguous = false;
  std::string message;

  int bounces() const { return static_cast<int>(vertices.size()); }
  nlohmann::json to_json() const;
};

struct TraceOptions {
  int max_bounces = 16;
};

/// Launches (x, z_floor) straight up and follows it through every patch.
/// Throws numerical_failure naming the patch and segment.
TraceResult trace_ray(const MirrorSystem& system, const Vec2& x, const TraceOptions& opts = {});

struct VerificationReport {
  int sample_count = 0;
  double max_map_error = 0.0;
  /// Largest spread of tau among rays hitting the same patch sequence.
  double path_constant_spread = 0.0;
  double mean_path_length_shift = 0.0;
  std::map<int, int> reflection_histogram;
  std::vector<TraceResult> failures;
  std::vector<TraceResult> boundary_ambiguous;
  int superfluous_hit_count = 0;
  double tolerance = 0.0;
  int expected_reflections = 0;
  bool passed = false;

  nlohmann::json to_json() const;
};

/// Entry labels traced by verify_system: Halton points plus boundary samples.
std::vector<Vec2> verification_labels(const Domain& entry, int samples);

/// Map error must stay within tol * max(1, exit scale) and the tau spread
/// within tol * max(1, |mean tau|).
VerificationReport verify_system(const MirrorSystem& system, const PlaneMap& expected, int samples = 1000,
                                 double tol = 1e-9);

/// Mean and spread of tau over Halton samples. Throws trace_failure on any non-ok trace.
std::pair<double, double> measure_time_shift(const MirrorSystem& system, int samples = 256);

}  // namespace periscope
