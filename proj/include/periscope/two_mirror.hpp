#pragma once

#include <optional>
#include <vector>

#include "periscope/mirror.hpp"
#include "periscope/plane_map.hpp"
#include "periscope/verifier.hpp"

namespace periscope {

/// Potential G on D1, path constant c and height offset h of a two-mirror periscope.
struct TwoMirrorSpec {
  ScalarField potential;
  Domain entry_domain;
  std::optional<double> c;
  double h = 0.0;
};

struct SynthesisOptions {
  int verify_samples = 256;
  double tolerance = 1e-8;
  /// Times c may be doubled when verification finds extra intersections.
  int max_doublings = 4;
};

/// 2 sqrt(3) M: the middle segment then descends faster than any mirror slope
/// whenever sup |g| <= M.
double path_constant_for_bound(double sup_displacement);

/// path_constant_for_bound(1.05 * sampled sup |g|). Throws zero_displacement.
double choose_path_constant(const PlaneMap& displacement, const Domain& entry_domain);

/// Mirrors Phi1 = G / c + h over D1 and Phi2 over D2 = (id + grad G)(D1).
/// The result has been traced and verified against id + grad G.
MirrorSystem synthesize_two_mirror(const TwoMirrorSpec& spec, const SynthesisOptions& opts = {});

struct GradientRecovery {
  double c = 0.0;
  ScalarField potential;
  /// max |g(x) - c grad Phi1(x)| over traced rays.
  double residual = 0.0;
  /// max - min of |A1A2| + (A1.z - A2.z) over traced rays.
  double path_constant_spread = 0.0;
  int traced = 0;
  int skipped = 0;
};

/// Reads g(x) and c back off a two-patch system by tracing. Does not throw on
/// inconsistency; rays without exactly two reflections are skipped.
GradientRecovery recover_gradient_report(const MirrorSystem& system, int samples = 256);

/// As above, throwing inconsistent_system when the residual or the relative
/// spread exceeds 1e-6.
GradientRecovery recover_gradient(const MirrorSystem& system, int samples = 256);

struct LegendreResult {
  double max_residual = 0.0;
  int checked = 0;
  int skipped = 0;
};

/// Checks the Legendre relation between Psi1 and Psi2 on Halton samples of D1.
/// `second_mirror` replaces the synthesized Phi2 when given.
LegendreResult legendre_check(const TwoMirrorSpec& spec, int samples = 256,
                              const std::optional<ScalarField>& second_mirror = std::nullopt);

struct PiecewisePiece {
  Domain domain;              // N_i
  ScalarField potential;      // G_i
  Domain extension_domain;    // N~_i, convex, containing N_i
  ScalarField extension;      // G~_i, equal to G_i on N_i
  std::optional<double> c;
};

struct PiecewiseSpec {
  std::vector<PiecewisePiece> pieces;
  double h = 0.0;
};

/// One two-mirror pair per piece, each pair placed below the previous ones.
MirrorSystem synthesize_piecewise(const PiecewiseSpec& spec, const SynthesisOptions& opts = {});

/// Displacement x -> grad G(x) of a potential.
PlaneMap displacement_of(const ScalarField& potential, const Domain& source);

}  // namespace periscope
