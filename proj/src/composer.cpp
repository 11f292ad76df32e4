#include "periscope/composer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "periscope/calculus.hpp"

namespace periscope {

using nlohmann::json;

namespace {

std::string point_text(const Vec2& p) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

std::string describe(const VerificationReport& rep) {
  std::ostringstream os;
  os << "max map error " << rep.max_map_error << " (tolerance " << rep.tolerance << "), path constant spread "
     << rep.path_constant_spread << ", " << rep.failures.size() << " failed rays, " << rep.superfluous_hit_count
     << " superfluous hits";
  if (!rep.failures.empty()) {
    const auto& f = rep.failures.front();
    os << "; first failure at " << point_text(f.entry_label) << " with " << f.bounces() << " reflections, status "
       << to_string(f.status);
    if (!f.message.empty()) os << " (" << f.message << ")";
  }
  return os.str();
}

Box box_of(const std::vector<Vec2>& pts) {
  Box b{Vec2::Constant(INFINITY), Vec2::Constant(-INFINITY)};
  for (const auto& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

Domain translated(const Domain& d, const Vec2& b) {
  if (d.kind() == Domain::Kind::disc) return Domain::disc(d.disc_center() + b, d.disc_radius());
  if (d.kind() == Domain::Kind::polygon) {
    auto v = d.vertices();
    for (auto& p : v) p += b;
    return Domain::polygon(std::move(v));
  }
  return Domain::mapped(d, PlaneMap::translation(b, d));
}

MirrorSystem merged(const std::vector<const MirrorSystem*>& stages, const std::vector<std::string>& prefixes) {
  MirrorSystem out;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (const auto& p : stages[s]->patches) out.patches.push_back(p.renamed(prefixes[s] + p.id()));
    out.expected_reflections += stages[s]->expected_reflections;
    for (double c : stages[s]->path_constants) out.path_constants.push_back(c);
  }
  out.entry_domain = stages.front()->entry_domain;
  out.exit_domain = stages.back()->exit_domain;
  return out;
}

double stage_gap(double scale) { return 0.1 * std::max(1.0, scale); }

VerificationReport verify_or_throw(const MirrorSystem& sys, const PlaneMap& expected, int samples, double tol) {
  VerificationReport rep = verify_system(sys, expected, samples, tol);
  if (!rep.passed) throw Error(ErrorCode::verification_failed, describe(rep));
  return rep;
}

}  // namespace

json CompositePlan::to_json() const {
  json st = json::array();
  for (const auto& [sys, dz] : stages) {
    st.push_back({{"offset", dz},
                  {"patches", sys.patches.size()},
                  {"reflections", sys.expected_reflections},
                  {"z_range", {sys.z_min(), sys.z_max()}}});
  }
  json mids = json::array();
  for (const auto& d : intermediate_domains) mids.push_back(d.to_json());
  json shifts = json::array();
  for (const auto& b : shift_vectors) shifts.push_back({b.x(), b.y()});
  return {{"stages", st}, {"intermediate_domains", mids}, {"shift_vectors", shifts}};
}

Realization compose_four_mirror(const ScalarField& phi, const ScalarField& psi, const Domain& d1,
                                const ComposeOptions& opts) {
  const PlaneMap grad_phi = PlaneMap::gradient_of(phi, false, d1);
  const Domain mid = Domain::mapped(d1, grad_phi);
  const PlaneMap grad_psi = PlaneMap::gradient_of(psi, false, mid);
  const Domain d2 = Domain::mapped(mid, grad_psi);
  if (!d1.is_convex() || !mid.is_convex() || !d2.is_convex()) {
    throw Error(ErrorCode::precondition, "D1, grad phi(D1) and its image under grad psi must be convex");
  }

  Vec2 b = Vec2::Zero();
  if (opts.force_shift || !interiors_disjoint(mid, d1) || !interiors_disjoint(mid, d2)) {
    std::vector<Vec2> pts = d1.outline(64);
    for (const auto& d : {mid, d2})
      for (const auto& p : d.outline(64)) pts.push_back(p);
    const double scene = std::max(1e-9, box_of(pts).diameter());
    bool found = false;
    for (int ring = 1; ring <= 40 && !found; ++ring) {
      const double r = 0.25 * ring * scene;
      for (int k = 0; k < 8 * ring && !found; ++k) {
        const double th = 2.0 * std::numbers::pi * k / (8 * ring);
        const Vec2 cand(r * std::cos(th), r * std::sin(th));
        const Domain moved = translated(mid, cand);
        if (interiors_disjoint(moved, d1) && interiors_disjoint(moved, d2)) {
          b = cand;
          found = true;
        }
      }
    }
    if (!found) throw Error(ErrorCode::no_valid_shift, "no translation within 10 scene diameters clears D1 and D2");
  }
  const Domain mid_shifted = b.isZero() ? mid : translated(mid, b);

  // First pair realizes grad phi + b, the second eta -> grad psi(eta - b).
  const ScalarField ga = ScalarField::affine(phi, 1.0, b, -1.0, 0.0);
  const ScalarField gb = ScalarField::affine(psi, 1.0, Vec2::Zero(), -1.0, 0.0, Mat2::Identity(), -b);
  const MirrorSystem a = synthesize_two_mirror({ga, d1, std::nullopt, 0.0}, opts.synthesis);
  const MirrorSystem bsys = synthesize_two_mirror({gb, mid_shifted, std::nullopt, 0.0}, opts.synthesis);

  const double gap = stage_gap(std::max(a.diameter(), bsys.diameter()));
  const double off_a = -gap - a.z_max();
  const double off_b = gap - bsys.z_min();
  const MirrorSystem lower = a.translated(off_a);
  const MirrorSystem upper = bsys.translated(off_b);

  Realization out;
  out.system = merged({&lower, &upper}, {"a_", "b_"});
  out.system.metadata = {{"construction", "four-mirror"},
                         {"shift", {b.x(), b.y()}},
                         {"offsets", {off_a, off_b}},
                         {"phi", phi.to_json()},
                         {"psi", psi.to_json()}};
  out.plan.stages = {{lower, off_a}, {upper, off_b}};
  out.plan.intermediate_domains = {mid_shifted};
  out.plan.shift_vectors = {b};
  const PlaneMap expected = PlaneMap::compose(grad_psi, grad_phi);
  out.report = verify_or_throw(out.system, expected, opts.verify_samples, opts.tolerance);
  return out;
}

std::optional<std::pair<Vec2, Vec2>> orientation_witnesses(const PlaneMap& f, const Domain& d1, int samples) {
  std::optional<Vec2> pos, neg;
  auto pts = grid_points(d1, samples);
  for (const auto& p : d1.boundary_points(4 * samples)) pts.push_back(p);
  for (const auto& p : pts) {
    const double det = f.jacobian(p).determinant();
    if (det > 0.0 && !pos) pos = p;
    if (det < 0.0 && !neg) neg = p;
  }
  if (pos && neg) return std::make_pair(*pos, *neg);
  return std::nullopt;
}

namespace {

void require_orientation(const PlaneMap& f, const Domain& d1, Orientation want) {
  if (const auto w = orientation_witnesses(f, d1)) {
    throw Error(ErrorCode::precondition, "orientation is mixed on D1: det Df > 0 at " + point_text(w->first) +
                                             " and det Df < 0 at " + point_text(w->second));
  }
  const Orientation got = orientation(f, d1);
  if (got == want) return;
  if (got == Orientation::preserving) {
    throw Error(ErrorCode::precondition,
                "f preserves orientation; use the six-reflection construction (realize_orientation_preserving)");
  }
  if (got == Orientation::reversing) {
    throw Error(ErrorCode::precondition,
                "f reverses orientation; use the four-reflection construction (realize_orientation_reversing)");
  }
  throw Error(ErrorCode::precondition, "det Df vanishes on D1");
}

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const std::size_t skip = to_string(e.code()).size() + 2;
  return what.size() > skip ? what.substr(skip) : what;
}

struct Cell {
  Domain piece;
  Vec2 center;
  double radius;
  std::string label;
};

std::vector<Cell> grid_cells(const Domain& d1, int n) {
  const Box bb = d1.bounds();
  const Vec2 w = bb.extent() / n;
  const double tol = 1e-12 * d1.scale();
  const auto outline = d1.outline(512);
  std::vector<Cell> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 lo = bb.lo + Vec2(i * w.x(), j * w.y());
      const Vec2 hi = lo + w;
      auto in_rect = [&](const Vec2& p) {
        return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol && p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
      };
      std::vector<Vec2> pts;
      const int m = 32;
      for (int k = 0; k <= m; ++k) {
        const double t = static_cast<double>(k) / m;
        for (const Vec2& p : {Vec2(lo.x() + t * w.x(), lo.y()), Vec2(lo.x() + t * w.x(), hi.y()),
                              Vec2(lo.x(), lo.y() + t * w.y()), Vec2(hi.x(), lo.y() + t * w.y())})
          if (d1.contains(p, tol)) pts.push_back(p);
      }
      for (int a = 1; a < 8; ++a)
        for (int b = 1; b < 8; ++b) {
          const Vec2 p = lo + Vec2(a * w.x() / 8, b * w.y() / 8);
          if (d1.contains(p, 0.0)) pts.push_back(p);
        }
      for (const auto& p : outline)
        if (in_rect(p)) pts.push_back(p);
      if (pts.empty()) continue;
      const Vec2 mid = 0.5 * (lo + hi);
      Vec2 center = mid;
      if (!d1.contains(mid, 0.0)) {
        center = Vec2::Zero();
        for (const auto& p : pts) center += p;
        center /= static_cast<double>(pts.size());
      }
      double r = 0.0;
      for (const auto& p : pts) r = std::max(r, (p - center).norm());
      r = 1.01 * r + 1e-9 * d1.scale();
      const Domain piece = n == 1 && d1.is_convex() ? d1 : Domain::intersection({Domain::rectangle(lo, hi), d1});
      cells.push_back({piece, center, r, "cell (" + std::to_string(i) + ", " + std::to_string(j) + ")"});
    }
  }
  return cells;
}

}  // namespace

Realization realize_orientation_reversing(const PlaneMap& f, const Domain& d1, const RealizeOptions& opts) {
  if (opts.partition < 1) throw Error(ErrorCode::invalid_argument, "partition must be >= 1");
  if (opts.check_orientation) require_orientation(f, d1, Orientation::reversing);

  std::vector<Cell> cells;
  std::vector<DecompositionResult> parts;
  std::string last_failure;
  int n = opts.partition;
  for (int refine = 0; refine <= opts.max_refinements; ++refine, n *= 2) {
    cells = grid_cells(d1, n);
    parts.clear();
    bool ok = true;
    for (const auto& cell : cells) {
      DecomposeOptions dopt = opts.decomposition;
      dopt.initial_radius = cell.radius;
      dopt.minimum_radius = cell.radius;
      try {
        parts.push_back(decompose_local(f, cell.center, dopt));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::not_hyperbolic) {
          throw Error(e.code(), cell.label + " at " + point_text(cell.center) + ": " + strip_code(e));
        }
        if (e.code() != ErrorCode::radius_underflow) {
          throw Error(ErrorCode::decomposition_failed, cell.label + " at " + point_text(cell.center) + ": " + e.what());
        }
        last_failure = cell.label + " at " + point_text(cell.center) + ": " + e.what();
        ok = false;
        break;
      }
    }
    if (ok) break;
    parts.clear();
  }
  if (parts.empty()) {
    throw Error(ErrorCode::cell_too_large, "cells still exceed the decomposition radius after " +
                                               std::to_string(opts.max_refinements) + " refinements; " + last_failure);
  }

  // Mid-beam domains B'_k on a row well clear of every disc and its image.
  const std::size_t m = cells.size();
  std::vector<Domain> discs, images, mids;
  std::vector<Vec2> scene = d1.outline(128);
  double mid_size = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    discs.push_back(Domain::disc(parts[k].center, parts[k].radius));
    images.push_back(Domain::mapped(discs[k], f.with_source(discs[k])));
    const PlaneMap gphi = PlaneMap::gradient_of(parts[k].phi, false, discs[k]);
    mids.push_back(Domain::mapped(discs[k], gphi));
    for (const auto& p : discs[k].outline(64)) scene.push_back(p);
    for (const auto& p : images[k].outline(64)) scene.push_back(p);
    mid_size = std::max(mid_size, mids[k].bounds().diameter());
  }
  const Box scene_box = box_of(scene);
  const double s = 1.5 * std::max(scene_box.diameter(), mid_size);
  std::vector<Vec2> shifts;
  std::vector<Domain> shifted_mids;
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 target = scene_box.center() + Vec2(0.0, (2.0 + k) * s);
    shifts.push_back(target - mids[k].bounds().center());
    shifted_mids.push_back(translated(mids[k], shifts[k]));
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      if ((j > k && !interiors_disjoint(shifted_mids[k], shifted_mids[j])) ||
          !interiors_disjoint(shifted_mids[k], discs[j]) || !interiors_disjoint(shifted_mids[k], images[j])) {
        throw Error(ErrorCode::shift_packing, "shifted middle domain " + std::to_string(k) + " is not isolated");
      }
    }
  }

  PiecewiseSpec phi_spec, u_spec;
  json cell_info = json::array();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2& b = shifts[k];
    const ScalarField gphi = ScalarField::affine(parts[k].phi, 1.0, b, -1.0, 0.0);
    const ScalarField gu = ScalarField::affine(parts[k].u, 1.0, b, -1.0, 0.0);
    phi_spec.pieces.push_back({cells[k].piece, gphi, discs[k], gphi, std::nullopt});
    const Domain piece_image = Domain::mapped(cells[k].piece, f.with_source(cells[k].piece));
    u_spec.pieces.push_back({piece_image, gu, images[k], gu, std::nullopt});
    cell_info.push_back({{"center", {cells[k].center.x(), cells[k].center.y()}},
                         {"radius", parts[k].radius},
                         {"residual", parts[k].residual},
                         {"shift", {b.x(), b.y()}}});
  }
  const MirrorSystem cphi = synthesize_piecewise(phi_spec, opts.synthesis);
  const MirrorSystem cu = synthesize_piecewise(u_spec, opts.synthesis);

  // Both collections below z = 0, phi pairs above u pairs; psi pairs are the mirror image of the u pairs.
  const double gap = stage_gap(std::max(cphi.diameter(), cu.diameter()));
  const double off_phi = -gap - cphi.z_max();
  const MirrorSystem lower = cphi.translated(off_phi);
  const double off_u = lower.z_min() - gap - cu.z_max();
  const MirrorSystem upper = cu.translated(off_u).z_mirrored();

  Realization out;
  out.system = merged({&lower, &upper}, {"cphi_", "cpsi_"});
  out.system.entry_domain = d1;
  out.system.metadata = {{"construction", "orientation-reversing"},
                         {"partition", n},
                         {"cells", cell_info},
                         {"layout", "phi pairs above u pairs below z = 0, psi pairs mirrored above"},
                         {"offsets", {off_phi, -off_u}}};
  out.plan.stages = {{lower, off_phi}, {upper, -off_u}};
  out.plan.intermediate_domains = shifted_mids;
  out.plan.shift_vectors = shifts;
  out.report = verify_or_throw(out.system, f.with_source(d1), opts.verify_samples, opts.tolerance);
  return out;
}

MirrorSystem flip_stage(const Domain& d1, double a, double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::invalid_argument, "flip parameter must be positive");
  Jet lower(2), upper(2);
  lower(0, 0) = 0.5 * c;
  lower(2, 0) = -0.5 / c;
  upper(0, 0) = -0.5 * c;
  upper(2, 0) = 0.5 / c;
  Mat2 m;
  m << -1.0, 0.0, 0.0, 1.0;
  const PlaneMap sigma = PlaneMap::linear(m, Vec2(2.0 * a, 0.0), d1);
  Domain image;
  if (d1.kind() == Domain::Kind::disc) {
    image = Domain::disc(sigma(d1.disc_center()), d1.disc_radius());
  } else if (d1.kind() == Domain::Kind::polygon) {
    std::vector<Vec2> v(d1.vertices().rbegin(), d1.vertices().rend());
    for (auto& p : v) p = sigma(p);
    image = Domain::polygon(std::move(v));
  } else {
    image = Domain::mapped(d1, sigma);
  }
  MirrorSystem sys;
  sys.patches.emplace_back(d1, ScalarField::polynomial(lower, Vec2(a, 0.0)), "flip1");
  sys.patches.emplace_back(image, ScalarField::polynomial(upper, Vec2(a, 0.0)), "flip2");
  sys.expected_reflections = 2;
  sys.path_constants = {2.0 * c};
  sys.entry_domain = d1;
  sys.exit_domain = image;
  sys.metadata = {{"construction", "flip"}, {"a", a}, {"c", c}};
  return sys;
}

Realization realize_orientation_preserving(const PlaneMap& f, const Domain& d1, const RealizeOptions& opts) {
  require_orientation(f, d1, Orientation::preserving);
  const Box bb = d1.bounds();
  double a = 0.0;
  if (bb.hi.x() >= 0.0) {
    if (!opts.auto_translate) {
      throw Error(ErrorCode::placement_failure, "D1 reaches x1 >= 0 and automatic placement of the flip line is off");
    }
    a = bb.hi.x() + 0.25 * std::max(bb.extent().x(), 1e-3 * d1.scale());
  }
  Mat2 m;
  m << -1.0, 0.0, 0.0, 1.0;
  const PlaneMap sigma = PlaneMap::linear(m, Vec2(2.0 * a, 0.0), d1);
  const PlaneMap sigma_shift = PlaneMap::linear(m - Mat2::Identity(), Vec2(2.0 * a, 0.0), d1);
  const double c = opts.flip_c ? *opts.flip_c : 0.5 * choose_path_constant(sigma_shift, d1);
  const MirrorSystem flip = flip_stage(d1, a, c);

  const Domain& flipped = flip.exit_domain;
  const PlaneMap fstar = PlaneMap::compose(f, sigma.with_source(flipped));
  Realization rev = realize_orientation_reversing(fstar, flipped, opts);

  const double gap = stage_gap(std::max(flip.diameter(), rev.system.diameter()));
  const double off = rev.system.z_min() - gap - flip.z_max();
  const MirrorSystem lower = flip.translated(off);

  Realization out;
  out.system = merged({&lower, &rev.system}, {"", ""});
  out.system.metadata = {{"construction", "orientation-preserving"},
                         {"flip_line", a},
                         {"flip_c", c},
                         {"flip_offset", off},
                         {"reversing", rev.system.metadata}};
  out.plan.stages = {{lower, off}};
  for (auto& st : rev.plan.stages) out.plan.stages.push_back(std::move(st));
  out.plan.intermediate_domains = {flipped};
  for (auto& d : rev.plan.intermediate_domains) out.plan.intermediate_domains.push_back(std::move(d));
  out.plan.shift_vectors = {Vec2(2.0 * a, 0.0)};
  for (auto& b : rev.plan.shift_vectors) out.plan.shift_vectors.push_back(b);
  out.report = verify_or_throw(out.system, f.with_source(d1), opts.verify_samples, opts.tolerance);
  return out;
}

MirrorSystem invert_system(const MirrorSystem& system) {
  MirrorSystem out = system.z_mirrored();
  out.metadata["inverted"] = !system.metadata.value("inverted", false);
  return out;
}

}  // namespace periscope
