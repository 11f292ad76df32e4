#include "periscope/two_mirror.hpp"

#include <cmath>
#include <sstream>

#include "periscope/calculus.hpp"

namespace periscope {

namespace {

std::optional<int> polynomial_degree(const ScalarField& f) {
  if (f.kind() != "polynomial") return std::nullopt;
  int degree = 0;
  const nlohmann::json j = f.to_json();
  for (const auto& t : j.at("coefficients")) degree = std::max(degree, t.at(0).get<int>() + t.at(1).get<int>());
  return degree;
}

// Phi2 in closed form when grad G is affine, otherwise by lazy inversion.
ScalarField second_mirror_field(const ScalarField& g, double c, double h, const Domain& source) {
  const auto degree = polynomial_degree(g);
  if (degree && *degree <= 2) {
    const Jet j = g.expand(Vec2::Zero(), 2);
    const Vec2 b = j.gradient();
    const Mat2 hess = j.hessian();
    const Mat2 a = Mat2::Identity() + hess;
    if (std::abs(a.determinant()) > 1e-12) {
      // Q(x) = G / c + h + (|H x + b|^2 - c^2) / (2c), then Phi2(y) = Q(A^-1 (y - b)).
      Jet q = j / c + h;
      const Mat2 hh = hess * hess;
      const Vec2 hb = hess * b;
      q(0, 0) += (b.squaredNorm() - c * c) / (2.0 * c);
      q(1, 0) += hb.x() / c;
      q(0, 1) += hb.y() / c;
      q(2, 0) += hh(0, 0) / (2.0 * c);
      q(0, 2) += hh(1, 1) / (2.0 * c);
      q(1, 1) += hh(0, 1) / c;
      const Mat2 inv = a.inverse();
      return ScalarField::affine(ScalarField::polynomial(q), 1.0, Vec2::Zero(), 0.0, 0.0, inv, -inv * b);
    }
  }
  return ScalarField::second_mirror(g, c, h, source);
}

std::string describe(const VerificationReport& rep) {
  std::ostringstream os;
  os << "max map error " << rep.max_map_error << ", path constant spread " << rep.path_constant_spread << ", "
     << rep.failures.size() << " failed rays, " << rep.superfluous_hit_count << " superfluous hits";
  return os.str();
}

bool geometric_failure(const VerificationReport& rep) {
  return rep.superfluous_hit_count > 0 || !rep.failures.empty();
}

}  // namespace

PlaneMap displacement_of(const ScalarField& potential, const Domain& source) {
  return PlaneMap::gradient_of(potential, false, source);
}

double path_constant_for_bound(double sup_displacement) { return 2.0 * std::sqrt(3.0) * sup_displacement; }

double choose_path_constant(const PlaneMap& displacement, const Domain& entry_domain) {
  const double m = sampled_sup_norm(displacement, entry_domain);
  if (!(m > 0.0)) throw Error(ErrorCode::zero_displacement, "the displacement vanishes on the entry domain");
  return path_constant_for_bound(1.05 * m);
}

MirrorSystem synthesize_two_mirror(const TwoMirrorSpec& spec, const SynthesisOptions& opts) {
  const Domain& d1 = spec.entry_domain;
  const ScalarField& g = spec.potential;
  if (!d1.is_convex()) throw Error(ErrorCode::precondition, "entry domain must be convex");
  const PlaneMap f = PlaneMap::gradient_of(g, true, d1);
  if (!(sampled_sup_norm(displacement_of(g, d1), d1) > 0.0)) {
    throw Error(ErrorCode::domains_not_disjoint, "grad G vanishes, so the exit beam coincides with the entry beam");
  }
  if (!is_sampled_diffeomorphism(f, d1)) {
    throw Error(ErrorCode::precondition, "x + grad G folds on the entry domain (det D(x + grad G) changes sign)");
  }
  const Domain d2 = Domain::mapped(d1, f);
  if (!interiors_disjoint(d1, d2)) throw Error(ErrorCode::domains_not_disjoint, "D1 and its image overlap");
  if (!d2.is_convex()) throw Error(ErrorCode::image_not_convex, "the image of D1 is not convex");

  double c = spec.c ? *spec.c : choose_path_constant(displacement_of(g, d1), d1);
  if (!(c > 0.0)) throw Error(ErrorCode::invalid_argument, "path constant must be positive");

  for (int attempt = 0; attempt <= opts.max_doublings; ++attempt) {
    MirrorSystem sys;
    sys.patches.emplace_back(d1, g.scaled(1.0 / c).plus_constant(spec.h), "phi1");
    sys.patches.emplace_back(d2, second_mirror_field(g, c, spec.h, d1), "phi2");
    sys.expected_reflections = 2;
    sys.path_constants = {c};
    sys.entry_domain = d1;
    sys.exit_domain = d2;
    sys.metadata = {{"construction", "two-mirror"}, {"c", c}, {"h", spec.h}, {"potential", g.to_json()}};
    const VerificationReport rep = verify_system(sys, f, opts.verify_samples, opts.tolerance);
    if (rep.passed) return sys;
    if (!geometric_failure(rep)) throw Error(ErrorCode::verification_failed, describe(rep));
    c *= 2.0;
  }
  throw Error(ErrorCode::c_too_small, "extra intersections remain after " + std::to_string(opts.max_doublings) +
                                          " doublings of c");
}

GradientRecovery recover_gradient_report(const MirrorSystem& system, int samples) {
  if (system.patches.size() != 2) throw Error(ErrorCode::precondition, "gradient recovery needs exactly two patches");
  const ScalarField& phi1 = system.patches[0].height();
  struct Row {
    Vec2 g, grad;
    double c;
  };
  std::vector<Row> rows;
  GradientRecovery out;
  for (const auto& x : halton_points(system.entry_domain, samples)) {
    TraceResult r;
    try {
      r = trace_ray(system, x);
    } catch (const Error&) {
      ++out.skipped;
      continue;
    }
    if (r.bounces() != 2 || r.patch_indices[0] != 0 || r.patch_indices[1] != 1) {
      ++out.skipped;
      continue;
    }
    const Vec3& a1 = r.vertices[0];
    const Vec3& a2 = r.vertices[1];
    rows.push_back({horizontal(a2) - x, phi1.gradient(x), (a2 - a1).norm() + (a1.z() - a2.z())});
  }
  if (rows.empty()) throw Error(ErrorCode::trace_failure, "no ray reflected off both mirrors");
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.c);
    hi = std::max(hi, row.c);
    sum += row.c;
  }
  out.c = sum / rows.size();
  out.path_constant_spread = hi - lo;
  out.traced = static_cast<int>(rows.size());
  for (const auto& row : rows) out.residual = std::max(out.residual, (row.g - out.c * row.grad).norm());
  const double h = system.metadata.contains("h") && system.metadata["h"].is_number()
                       ? system.metadata["h"].get<double>()
                       : 0.0;
  out.potential = phi1.plus_constant(-h).scaled(out.c);
  return out;
}

GradientRecovery recover_gradient(const MirrorSystem& system, int samples) {
  GradientRecovery out = recover_gradient_report(system, samples);
  if (out.residual > 1e-6 || out.path_constant_spread > 1e-6 * std::max(1.0, out.c)) {
    std::ostringstream os;
    os << "residual " << out.residual << ", path constant spread " << out.path_constant_spread;
    throw Error(ErrorCode::inconsistent_system, os.str());
  }
  return out;
}

LegendreResult legendre_check(const TwoMirrorSpec& spec, int samples, const std::optional<ScalarField>& second) {
  const Domain& d1 = spec.entry_domain;
  const ScalarField& g = spec.potential;
  const double c = spec.c ? *spec.c : choose_path_constant(displacement_of(g, d1), d1);
  const ScalarField phi1 = g.scaled(1.0 / c).plus_constant(spec.h);
  const ScalarField phi2 = second ? *second : second_mirror_field(g, c, spec.h, d1);
  const Domain d2 = Domain::mapped(d1, PlaneMap::gradient_of(g, true, d1));

  LegendreResult out;
  for (const auto& x : halton_points(d1, samples)) {
    const Vec2 grad_g = g.gradient(x);
    const Vec2 y = -x - grad_g;
    if (!d2.contains(-y)) {
      ++out.skipped;
      continue;
    }
    const FieldSample p1 = phi1.sample(x);
    const double psi1 = -0.5 * x.squaredNorm() + 0.25 * c * c - c * p1.value;
    const Vec2 grad_psi1 = -x - c * p1.gradient;
    const double psi2 = -0.5 * y.squaredNorm() + 0.25 * c * c + c * phi2.value(-y);
    const double res = (y - grad_psi1).norm() + std::abs(psi2 - (x.dot(y) - psi1));
    out.max_residual = std::max(out.max_residual, res);
    ++out.checked;
  }
  return out;
}

MirrorSystem synthesize_piecewise(const PiecewiseSpec& spec, const SynthesisOptions& opts) {
  const auto& pieces = spec.pieces;
  if (pieces.empty()) throw Error(ErrorCode::invalid_argument, "no pieces");
  if (pieces.size() == 1 && pieces[0].extension_domain.kind() == pieces[0].domain.kind() &&
      pieces[0].extension_domain.to_json() == pieces[0].domain.to_json()) {
    return synthesize_two_mirror({pieces[0].potential, pieces[0].domain, pieces[0].c, spec.h}, opts);
  }

  const std::size_t m = pieces.size();
  std::vector<PlaneMap> maps;
  std::vector<Domain> images;
  std::vector<double> sups;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = pieces[i];
    const std::string tag = "piece " + std::to_string(i) + ": ";
    const Domain& ext = p.extension_domain;
    if (!ext.is_convex()) throw Error(ErrorCode::extension_violation, tag + "extension domain is not convex");
    const double tol = 1e-9 * ext.scale();
    auto inside = p.domain.boundary_points(64);
    inside.push_back(p.domain.center());
    for (const auto& q : inside)
      if (!ext.contains(q, tol)) throw Error(ErrorCode::extension_violation, tag + "domain is not inside its extension");
    for (const auto& q : grid_points(p.domain, 16)) {
      const Vec2 a = p.potential.gradient(q), b = p.extension.gradient(q);
      if ((a - b).norm() > 1e-9 * std::max(1.0, a.norm())) {
        throw Error(ErrorCode::extension_violation, tag + "extension differs from the potential on its piece");
      }
    }
    const PlaneMap f_ext = PlaneMap::gradient_of(p.extension, true, ext);
    const Domain ext_image = Domain::mapped(ext, f_ext);
    if (!ext_image.is_convex()) throw Error(ErrorCode::extension_violation, tag + "extension image is not convex");
    if (!interiors_disjoint(ext, ext_image)) {
      throw Error(ErrorCode::extension_violation, tag + "extension domain meets its image");
    }
    maps.push_back(f_ext.with_source(p.domain));
    images.push_back(Domain::mapped(p.domain, f_ext));
    sups.push_back(sampled_sup_norm(displacement_of(p.extension, p.domain), p.domain));
    if (!(sups.back() > 0.0)) throw Error(ErrorCode::zero_displacement, tag + "displacement vanishes");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i < j && !interiors_disjoint(pieces[i].domain, pieces[j].domain)) {
        throw Error(ErrorCode::piece_overlap, "pieces " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
      if (i < j && !interiors_disjoint(images[i], images[j])) {
        throw Error(ErrorCode::piece_overlap,
                    "images of pieces " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
      if (!interiors_disjoint(images[i], pieces[j].domain)) {
        throw Error(ErrorCode::piece_overlap,
                    "image of piece " + std::to_string(i) + " meets piece " + std::to_string(j));
      }
    }
  }

  std::vector<double> cs(m);
  for (std::size_t i = 0; i < m; ++i) cs[i] = pieces[i].c ? *pieces[i].c : path_constant_for_bound(1.05 * sups[i]);

  std::vector<std::pair<Domain, PlaneMap>> expected_pieces;
  std::vector<Domain> entries;
  for (std::size_t i = 0; i < m; ++i) {
    expected_pieces.emplace_back(pieces[i].domain, maps[i]);
    entries.push_back(pieces[i].domain);
  }
  const PlaneMap expected = PlaneMap::piecewise(expected_pieces);

  for (int attempt = 0; attempt <= opts.max_doublings; ++attempt) {
    MirrorSystem sys;
    double h = spec.h, prev_lo = 0.0, prev_gap = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = pieces[i];
      const double c = cs[i];
      auto make = [&](double hh) {
        return std::make_pair(
            MirrorPatch(p.domain, p.extension.scaled(1.0 / c).plus_constant(hh), "phi1_" + std::to_string(i)),
            MirrorPatch(images[i], second_mirror_field(p.extension, c, hh, p.extension_domain),
                        "phi2_" + std::to_string(i)));
      };
      auto pair = make(0.0);
      const double lo = std::min(pair.first.z_min(), pair.second.z_min());
      const double hi = std::max(pair.first.z_max(), pair.second.z_max());
      if (i > 0) {
        // Top of this pair below the bottom of the previous one.
        h = h + prev_lo - hi - std::max(prev_gap, sups[i]);
        pair = make(h);
      } else if (h != 0.0) {
        pair = make(h);
      }
      prev_lo = lo;
      prev_gap = sups[i];
      sys.patches.push_back(pair.first);
      sys.patches.push_back(pair.second);
    }
    sys.expected_reflections = 2;
    sys.path_constants = cs;
    sys.entry_domain = Domain::union_of(entries);
    sys.exit_domain = Domain::union_of(images);
    sys.metadata = {{"construction", "piecewise-two-mirror"}, {"pieces", m}};
    const VerificationReport rep = verify_system(sys, expected, opts.verify_samples, opts.tolerance);
    if (rep.passed) return sys;
    if (!geometric_failure(rep)) throw Error(ErrorCode::verification_failed, describe(rep));
    for (std::size_t i = 0; i < m; ++i)
      if (!pieces[i].c) cs[i] *= 2.0;
  }
  throw Error(ErrorCode::c_too_small, "extra intersections remain after doubling the path constants");
}

}  // namespace periscope
