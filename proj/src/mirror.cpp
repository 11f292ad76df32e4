#include "periscope/mirror.hpp"

#include <cmath>
#include <limits>

#include "periscope/calculus.hpp"

namespace periscope {

MirrorPatch::MirrorPatch(Domain base_domain, ScalarField height, std::string id)
    : domain_(std::move(base_domain)), height_(std::move(height)), id_(std::move(id)) {
  constexpr int kSamples = 64;
  auto pts = grid_points(domain_, kSamples);
  for (const auto& p : domain_.boundary_points(4 * kSamples)) pts.push_back(p);
  double grad = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : pts) {
    const FieldSample s = height_.sample(p);
    if (!std::isfinite(s.value) || !s.gradient.allFinite()) continue;
    grad = std::max(grad, s.gradient.norm());
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  if (!std::isfinite(lo)) throw Error(ErrorCode::domain_error, "mirror '" + id_ + "' has no finite height samples");
  lipschitz_ = 1.5 * grad;
  const Box b = domain_.bounds();
  const double spacing = b.diameter() / (kSamples - 1);
  const double margin = lipschitz_ * spacing + 1e-9 * domain_.scale();
  z_min_ = lo - margin;
  z_max_ = hi + margin;
}

Vec3 MirrorPatch::normal(const Vec2& x) const {
  const Vec2 g = height_.gradient(x);
  return Vec3(-g.x(), -g.y(), 1.0).normalized();
}

MirrorPatch MirrorPatch::translated(double dz) const {
  MirrorPatch p = *this;
  p.height_ = height_.plus_constant(dz);
  p.z_min_ += dz;
  p.z_max_ += dz;
  return p;
}

MirrorPatch MirrorPatch::z_mirrored() const {
  MirrorPatch p = *this;
  p.height_ = -height_;
  p.z_min_ = -z_max_;
  p.z_max_ = -z_min_;
  return p;
}

MirrorPatch MirrorPatch::renamed(std::string id) const {
  MirrorPatch p = *this;
  p.id_ = std::move(id);
  return p;
}

double MirrorSystem::z_min() const {
  double z = std::numeric_limits<double>::infinity();
  for (const auto& p : patches) z = std::min(z, p.z_min());
  return patches.empty() ? 0.0 : z;
}

double MirrorSystem::z_max() const {
  double z = -std::numeric_limits<double>::infinity();
  for (const auto& p : patches) z = std::max(z, p.z_max());
  return patches.empty() ? 0.0 : z;
}

double MirrorSystem::diameter() const {
  if (patches.empty()) return 1.0;
  Box box = patches.front().base_domain().bounds();
  for (const auto& p : patches) {
    const Box b = p.base_domain().bounds();
    box.lo = box.lo.cwiseMin(b.lo);
    box.hi = box.hi.cwiseMax(b.hi);
  }
  const double dz = z_max() - z_min();
  return std::max(1.0, std::sqrt(box.extent().squaredNorm() + dz * dz));
}

MirrorSystem MirrorSystem::translated(double dz) const {
  MirrorSystem s = *this;
  for (auto& p : s.patches) p = p.translated(dz);
  return s;
}

MirrorSystem MirrorSystem::z_mirrored() const {
  MirrorSystem s = *this;
  s.patches.clear();
  for (auto it = patches.rbegin(); it != patches.rend(); ++it) s.patches.push_back(it->z_mirrored());
  std::swap(s.entry_domain, s.exit_domain);
  return s;
}

namespace {

// Interval of t where z(t) lies in [lo, hi].
bool z_window(double oz, double dz, double lo, double hi, double& t0, double& t1) {
  if (dz == 0.0) return oz >= lo && oz <= hi;
  double a = (lo - oz) / dz, b = (hi - oz) / dz;
  if (a > b) std::swap(a, b);
  t0 = std::max(t0, a);
  t1 = std::min(t1, b);
  return t0 <= t1;
}

}  // namespace

std::optional<PatchHit> intersect_ray_patch(const Ray& ray, const MirrorPatch& patch, double t_min) {
  if (t_min < 0.0) throw Error(ErrorCode::invalid_argument, "t_min must be non-negative");
  const ScalarField& phi = patch.height();
  const Domain& dom = patch.base_domain();
  const Vec2 o = horizontal(ray.origin);
  const Vec2 h = horizontal(ray.direction);
  const double dz = ray.direction.z();

  auto hit_at = [&](double t) -> PatchHit {
    const Vec3 p = ray.at(t);
    return {t, p, patch.normal(horizontal(p))};
  };

  if (h.norm() < 1e-15) {
    if (!dom.contains(o)) return std::nullopt;
    const double z = phi.value(o);
    if (!std::isfinite(z)) return std::nullopt;
    const double t = (z - ray.origin.z()) / dz;
    if (!(t > t_min)) return std::nullopt;
    PatchHit hit = hit_at(t);
    hit.point.z() = z;
    return hit;
  }

  const auto clip = dom.clip(o, h);
  if (!clip) return std::nullopt;
  double t0 = std::max(clip->first, t_min);
  double t1 = clip->second;
  if (!z_window(ray.origin.z(), dz, patch.z_min(), patch.z_max(), t0, t1)) return std::nullopt;
  if (!(t0 <= t1) || !std::isfinite(t0) || !std::isfinite(t1)) return std::nullopt;

  auto F = [&](double t) {
    const Vec3 p = ray.at(t);
    return phi.value(horizontal(p)) - p.z();
  };
  const double lip = patch.lipschitz();
  const double min_step = 1e-4 * (t1 - t0);

  double ta = t0;
  double fa = F(ta);
  if (fa == 0.0 && ta > t_min && dom.contains(horizontal(ray.at(ta)))) return hit_at(ta);
  while (ta < t1) {
    const double step = std::isfinite(fa) ? std::max(std::abs(fa) / (1.0 + lip), min_step) : min_step;
    const double tb = std::min(ta + step, t1);
    if (!(tb > ta)) break;
    const double fb = F(tb);
    if (std::isfinite(fa) && std::isfinite(fb) && ((fa < 0.0) != (fb < 0.0) || fb == 0.0)) {
      double lo = ta, hi = tb, flo = fa;
      int iterations = 0;
      while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if (!std::isfinite(fm)) throw Error(ErrorCode::numerical_failure, "height undefined inside a bracket");
        if ((fm < 0.0) == (flo < 0.0) && fm != 0.0) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (++iterations > 200) throw Error(ErrorCode::numerical_failure, "bisection did not converge");
      }
      double t = 0.5 * (lo + hi);
      // One Newton polish, kept only if it stays in the bracket.
      const Vec3 p = ray.at(t);
      const FieldSample s = phi.sample(horizontal(p));
      const double slope = s.gradient.dot(h) - dz;
      if (std::isfinite(s.value) && slope != 0.0) {
        const double tn = t - (s.value - p.z()) / slope;
        if (tn >= lo - 1e-12 && tn <= hi + 1e-12) t = tn;
      }
      if (t > t_min && dom.contains(horizontal(ray.at(t)))) return hit_at(t);
    }
    ta = tb;
    fa = fb;
  }
  return std::nullopt;
}

std::optional<PatchHit2> intersect_ray_patch(const Vec2& origin, const Vec2& direction, const MirrorPatch& patch,
                                              double t_min) {
  if (patch.base_domain().dimension() != 1) {
    throw Error(ErrorCode::invalid_argument, "planar rays need a one-dimensional patch");
  }
  const Ray ray(Vec3(origin.x(), 0.0, origin.y()), Vec3(direction.x(), 0.0, direction.y()));
  const auto hit = intersect_ray_patch(ray, patch, t_min);
  if (!hit) return std::nullopt;
  return PatchHit2{hit->t, Vec2(hit->point.x(), hit->point.z()), Vec2(hit->normal.x(), hit->normal.z())};
}

}  // namespace periscope
