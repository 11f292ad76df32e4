#pragma once

#include <optional>
#include <vector>

#include "periscope/decomposition.hpp"
#include "periscope/two_mirror.hpp"

namespace periscope {

/// Layout of a stacked system: stages bottom to top with the vertical offset
/// applied to each, the intermediate (mid-beam) domains and the shifts used.
struct CompositePlan {
  std::vector<std::pair<MirrorSystem, double>> stages;
  std::vector<Domain> intermediate_domains;
  std::vector<Vec2> shift_vectors;

  nlohmann::json to_json() const;
};

struct Realization {
  MirrorSystem system;
  CompositePlan plan;
  VerificationReport report;
};

struct ComposeOptions {
  SynthesisOptions synthesis;
  /// End-to-end verification.
  int verify_samples = 500;
  double tolerance = 1e-6;
  /// Shift the middle domain even when it misses D1 and D2.
  bool force_shift = false;
};

/// grad psi o grad phi by two stacked two-mirror systems.
/// Throws no_valid_shift when no translation of D' clears D1 and D2.
Realization compose_four_mirror(const ScalarField& phi, const ScalarField& psi, const Domain& d1,
                                const ComposeOptions& opts = {});

struct RealizeOptions {
  /// Cells per side of the grid over the bounding box of D1.
  int partition = 1;
  int max_refinements = 3;
  SynthesisOptions synthesis;
  DecomposeOptions decomposition;
  int verify_samples = 500;
  double tolerance = 1e-6;
  /// Flip stage path parameter; chosen from the flip displacement when unset.
  std::optional<double> flip_c;
  /// Move the flip line to the right of D1 when D1 is not inside x1 < 0.
  bool auto_translate = true;
  /// Skip the orientation precondition and go straight to the cell decompositions.
  bool check_orientation = true;
};

/// Sample points where det Df is positive and negative, when both occur.
std::optional<std::pair<Vec2, Vec2>> orientation_witnesses(const PlaneMap& f, const Domain& d1, int samples = 64);

/// Four reflections from per-cell gradient pieces. Requires det Df < 0 on D1.
Realization realize_orientation_reversing(const PlaneMap& f, const Domain& d1, const RealizeOptions& opts = {});

/// Six reflections: a parabolic-cylinder flip followed by the reversing
/// construction for f composed with the flip. Requires det Df > 0 on D1.
Realization realize_orientation_preserving(const PlaneMap& f, const Domain& d1, const RealizeOptions& opts = {});

/// The two parabolic cylinders realizing (x1, x2) -> (2a - x1, x2) on D1.
MirrorSystem flip_stage(const Domain& d1, double a, double c);

/// Mirror image in z = 0; realizes the inverse map.
MirrorSystem invert_system(const MirrorSystem& system);

}  // namespace periscope
