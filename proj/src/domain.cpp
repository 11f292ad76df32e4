#include "periscope/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "periscope/calculus.hpp"
#include "periscope/plane_map.hpp"

namespace periscope {

using nlohmann::json;

struct Domain::Impl {
  Kind kind = Kind::disc;
  // interval: a = lo.x, b = hi.x
  double a = 0.0, b = 0.0;
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  std::vector<Vec2> vertices;
  std::vector<Domain> parts;
  std::shared_ptr<Domain> base;
  std::shared_ptr<PlaneMap> forward;
  // mapped: cached outline and (preimage, image) lookup pairs
  std::vector<Vec2> cached_outline;
  std::vector<std::pair<Vec2, Vec2>> lookup;
  Box box{Vec2::Zero(), Vec2::Zero()};
};

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Box box_of(const std::vector<Vec2>& pts) {
  Box b{Vec2::Constant(std::numeric_limits<double>::infinity()),
        Vec2::Constant(-std::numeric_limits<double>::infinity())};
  for (const auto& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

bool polygon_contains(const std::vector<Vec2>& v, const Vec2& p, double tol) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    const double len = e.norm();
    if (len == 0.0) continue;
    // Signed distance to the left of the edge.
    if (cross(e, p - v[i]) / len < -tol) return false;
  }
  return true;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  double t = l2 > 0.0 ? (p - a).dot(ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Sutherland-Hodgman clip of `subject` against convex counterclockwise `clipper`.
std::vector<Vec2> clip_polygon(std::vector<Vec2> subject, const std::vector<Vec2>& clipper) {
  const std::size_t n = clipper.size();
  for (std::size_t i = 0; i < n && !subject.empty(); ++i) {
    const Vec2 a = clipper[i], b = clipper[(i + 1) % n];
    const Vec2 e = b - a;
    std::vector<Vec2> out;
    const std::size_t m = subject.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 p = subject[k], q = subject[(k + 1) % m];
      const double sp = cross(e, p - a), sq = cross(e, q - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

// Separating-axis test on two convex polygons; returns the largest gap found.
double separation(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  double best = -std::numeric_limits<double>::infinity();
  auto scan = [&](const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 e = poly[(i + 1) % n] - poly[i];
      if (e.norm() == 0.0) continue;
      const Vec2 axis = Vec2(e.y(), -e.x()).normalized();
      double pmin = INFINITY, pmax = -INFINITY, qmin = INFINITY, qmax = -INFINITY;
      for (const auto& v : p) {
        pmin = std::min(pmin, axis.dot(v));
        pmax = std::max(pmax, axis.dot(v));
      }
      for (const auto& v : q) {
        qmin = std::min(qmin, axis.dot(v));
        qmax = std::max(qmax, axis.dot(v));
      }
      best = std::max(best, std::max(qmin - pmax, pmin - qmax));
    }
  };
  scan(p);
  scan(q);
  return best;
}

std::vector<Vec2> disc_outline(const Vec2& c, double r, int n) {
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n;
    out.emplace_back(c.x() + r * std::cos(th), c.y() + r * std::sin(th));
  }
  return out;
}

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
Vec2 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

Domain::Domain() : Domain(disc(Vec2::Zero(), 1.0)) {}

Domain Domain::interval(double a, double b) {
  if (!(b > a)) throw Error(ErrorCode::invalid_argument, "interval needs a < b");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::interval;
  impl->a = a;
  impl->b = b;
  impl->box = {Vec2(a, 0.0), Vec2(b, 0.0)};
  return Domain(impl);
}

Domain Domain::disc(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "disc radius must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::disc;
  impl->center = center;
  impl->radius = radius;
  impl->box = {center - Vec2::Constant(radius), center + Vec2::Constant(radius)};
  return Domain(impl);
}

Domain Domain::polygon(std::vector<Vec2> v) {
  if (v.size() < 3) throw Error(ErrorCode::invalid_argument, "polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) area2 += cross(v[i], v[(i + 1) % v.size()]);
  const double scale = box_of(v).diameter();
  if (std::abs(area2) <= 1e-14 * scale * scale) {
    throw Error(ErrorCode::invalid_argument, "polygon vertices are collinear");
  }
  if (area2 < 0.0) std::reverse(v.begin(), v.end());
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = v[(i + 1) % n] - v[i];
    const Vec2 e2 = v[(i + 2) % n] - v[(i + 1) % n];
    if (cross(e1, e2) < -1e-12 * e1.norm() * e2.norm()) {
      throw Error(ErrorCode::invalid_argument, "polygon is not convex");
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::polygon;
  impl->box = box_of(v);
  impl->vertices = std::move(v);
  return Domain(impl);
}

Domain Domain::rectangle(const Vec2& lo, const Vec2& hi) {
  return polygon({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
}

Domain Domain::mapped(const Domain& base, const PlaneMap& forward) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::mapped;
  impl->base = std::make_shared<Domain>(base);
  impl->forward = std::make_shared<PlaneMap>(forward);
  for (const auto& p : base.outline(512)) impl->cached_outline.push_back(forward(p));
  for (const auto& p : grid_points(base, 17)) impl->lookup.emplace_back(p, forward(p));
  for (const auto& p : base.outline(64)) impl->lookup.emplace_back(p, forward(p));
  Box b = box_of(impl->cached_outline);
  for (const auto& [pre, img] : impl->lookup) {
    b.lo = b.lo.cwiseMin(img);
    b.hi = b.hi.cwiseMax(img);
  }
  const double margin = 1e-3 * b.diameter();
  if (base.dimension() == 1) {
    b.lo.y() = b.hi.y() = 0.0;
    b.lo.x() -= margin;
    b.hi.x() += margin;
  } else {
    b.lo -= Vec2::Constant(margin);
    b.hi += Vec2::Constant(margin);
  }
  impl->box = b;
  return Domain(impl);
}

Domain Domain::intersection(std::vector<Domain> parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "intersection of no domains");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::intersection;
  Box b = parts[0].bounds();
  for (const auto& p : parts) {
    const Box q = p.bounds();
    b.lo = b.lo.cwiseMax(q.lo);
    b.hi = b.hi.cwiseMin(q.hi);
  }
  if (b.empty()) throw Error(ErrorCode::invalid_argument, "intersection is empty");
  impl->box = b;
  impl->parts = std::move(parts);
  return Domain(impl);
}

Domain Domain::union_of(std::vector<Domain> parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "union of no domains");
  if (parts.size() == 1) return parts.front();
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::union_of;
  Box b = parts[0].bounds();
  for (const auto& p : parts) {
    const Box q = p.bounds();
    b.lo = b.lo.cwiseMin(q.lo);
    b.hi = b.hi.cwiseMax(q.hi);
  }
  impl->box = b;
  impl->parts = std::move(parts);
  return Domain(impl);
}

Domain::Kind Domain::kind() const { return impl_->kind; }

int Domain::dimension() const {
  switch (impl_->kind) {
    case Kind::interval: return 1;
    case Kind::mapped: return impl_->base->dimension();
    case Kind::intersection:
    case Kind::union_of: return impl_->parts[0].dimension();
    default: return 2;
  }
}

bool Domain::contains(const Vec2& p, double tol) const {
  const Impl& d = *impl_;
  switch (d.kind) {
    case Kind::interval:
      return std::abs(p.y()) <= std::max(tol, 0.0) + 1e-300 && p.x() >= d.a - tol && p.x() <= d.b + tol;
    case Kind::disc: return (p - d.center).norm() <= d.radius + tol;
    case Kind::polygon: return polygon_contains(d.vertices, p, tol);
    case Kind::intersection:
      for (const auto& part : d.parts)
        if (!part.contains(p, tol)) return false;
      return true;
    case Kind::union_of:
      for (const auto& part : d.parts)
        if (part.contains(p, tol)) return true;
      return false;
    case Kind::mapped: {
      const double slack = std::max(tol, 0.0);
      if (p.x() < d.box.lo.x() - slack || p.x() > d.box.hi.x() + slack || p.y() < d.box.lo.y() - slack ||
          p.y() > d.box.hi.y() + slack) {
        return false;
      }
      Vec2 guess = d.lookup.front().first;
      double best = INFINITY;
      for (const auto& [pre, img] : d.lookup) {
        const double dist = (img - p).squaredNorm();
        if (dist < best) {
          best = dist;
          guess = pre;
        }
      }
      try {
        const Vec2 x = invert_map(*d.forward, p, guess);
        return d.base->contains(x, tol);
      } catch (const Error&) {
        return false;
      }
    }
  }
  return false;
}

Box Domain::bounds() const { return impl_->box; }

Vec2 Domain::center() const {
  switch (impl_->kind) {
    case Kind::disc: return impl_->center;
    case Kind::interval: return {0.5 * (impl_->a + impl_->b), 0.0};
    case Kind::polygon: {
      Vec2 c = Vec2::Zero();
      for (const auto& v : impl_->vertices) c += v;
      return c / static_cast<double>(impl_->vertices.size());
    }
    case Kind::mapped: return (*impl_->forward)(impl_->base->center());
    case Kind::intersection: {
      const auto out = outline(128);
      if (out.empty()) return impl_->box.center();
      Vec2 c = Vec2::Zero();
      for (const auto& v : out) c += v;
      return c / static_cast<double>(out.size());
    }
    case Kind::union_of: {
      Vec2 c = Vec2::Zero();
      for (const auto& p : impl_->parts) c += p.center();
      return c / static_cast<double>(impl_->parts.size());
    }
  }
  return impl_->box.center();
}

double Domain::scale() const {
  const Box b = bounds();
  return std::max({1.0, b.diameter(), b.lo.cwiseAbs().maxCoeff(), b.hi.cwiseAbs().maxCoeff()});
}

std::vector<Vec2> Domain::outline(int n) const {
  const Impl& d = *impl_;
  switch (d.kind) {
    case Kind::interval: return {Vec2(d.a, 0.0), Vec2(d.b, 0.0)};
    case Kind::disc: return disc_outline(d.center, d.radius, std::max(n, 8));
    case Kind::polygon: return d.vertices;
    case Kind::mapped: {
      if (n >= static_cast<int>(d.cached_outline.size())) return d.cached_outline;
      std::vector<Vec2> out;
      for (const auto& p : d.base->outline(n)) out.push_back((*d.forward)(p));
      return out;
    }
    case Kind::intersection: {
      std::vector<Vec2> poly = d.parts[0].outline(n);
      for (std::size_t i = 1; i < d.parts.size(); ++i) poly = clip_polygon(poly, d.parts[i].outline(n));
      return poly;
    }
    case Kind::union_of: {
      std::vector<Vec2> out;
      for (const auto& part : d.parts)
        for (const auto& p : part.outline(n)) out.push_back(p);
      return out;
    }
  }
  return {};
}

std::vector<Vec2> Domain::boundary_points(int n) const {
  const Impl& d = *impl_;
  switch (d.kind) {
    case Kind::interval: return {Vec2(d.a, 0.0), Vec2(d.b, 0.0)};
    case Kind::polygon: {
      std::vector<Vec2> out;
      const std::size_t m = d.vertices.size();
      for (std::size_t i = 0; i < m; ++i) {
        out.push_back(d.vertices[i]);
        out.push_back(0.5 * (d.vertices[i] + d.vertices[(i + 1) % m]));
      }
      return out;
    }
    case Kind::disc: return disc_outline(d.center, d.radius, n);
    case Kind::mapped: {
      std::vector<Vec2> out;
      for (const auto& p : d.base->boundary_points(n)) out.push_back((*d.forward)(p));
      return out;
    }
    case Kind::intersection: {
      std::vector<Vec2> out;
      for (const auto& part : d.parts)
        for (const auto& p : part.boundary_points(n))
          if (contains(p)) out.push_back(p);
      return out;
    }
    case Kind::union_of: {
      std::vector<Vec2> out;
      for (const auto& part : d.parts)
        for (const auto& p : part.boundary_points(n)) out.push_back(p);
      return out;
    }
  }
  return {};
}

std::optional<std::pair<double, double>> Domain::clip(const Vec2& o, const Vec2& dir) const {
  const Impl& d = *impl_;
  const double inf = std::numeric_limits<double>::infinity();
  auto slab = [&](const Box& box, double slack) -> std::optional<std::pair<double, double>> {
    double t0 = -inf, t1 = inf;
    for (int k = 0; k < 2; ++k) {
      const double lo = box.lo[k] - slack, hi = box.hi[k] + slack;
      if (dir[k] == 0.0) {
        if (o[k] < lo || o[k] > hi) return std::nullopt;
      } else {
        double a = (lo - o[k]) / dir[k], b = (hi - o[k]) / dir[k];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
      }
    }
    if (t0 > t1) return std::nullopt;
    return std::make_pair(t0, t1);
  };
  const double slack = 1e-9 * scale();
  switch (d.kind) {
    case Kind::disc: {
      const Vec2 oc = o - d.center;
      const double aa = dir.squaredNorm();
      const double bb = oc.dot(dir);
      const double r = d.radius + slack;
      const double cc = oc.squaredNorm() - r * r;
      const double disc = bb * bb - aa * cc;
      if (aa == 0.0) {
        if (cc <= 0.0) return std::make_pair(-inf, inf);
        return std::nullopt;
      }
      if (disc < 0.0) return std::nullopt;
      const double s = std::sqrt(disc);
      return std::make_pair((-bb - s) / aa, (-bb + s) / aa);
    }
    case Kind::polygon: {
      double t0 = -inf, t1 = inf;
      const std::size_t n = d.vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = d.vertices[(i + 1) % n] - d.vertices[i];
        const double len = e.norm();
        // Inside: cross(e, p - v) / len >= -slack.
        const double num = cross(e, o - d.vertices[i]) / len + slack;
        const double den = cross(e, dir) / len;
        if (den == 0.0) {
          if (num < 0.0) return std::nullopt;
        } else if (den > 0.0) {
          t0 = std::max(t0, -num / den);
        } else {
          t1 = std::min(t1, -num / den);
        }
      }
      if (t0 > t1) return std::nullopt;
      return std::make_pair(t0, t1);
    }
    case Kind::intersection: {
      double t0 = -inf, t1 = inf;
      for (const auto& part : d.parts) {
        auto r = part.clip(o, dir);
        if (!r) return std::nullopt;
        t0 = std::max(t0, r->first);
        t1 = std::min(t1, r->second);
      }
      if (t0 > t1) return std::nullopt;
      return std::make_pair(t0, t1);
    }
    case Kind::union_of: {
      double t0 = inf, t1 = -inf;
      for (const auto& part : d.parts) {
        if (auto r = part.clip(o, dir)) {
          t0 = std::min(t0, r->first);
          t1 = std::max(t1, r->second);
        }
      }
      if (t0 > t1) return std::nullopt;
      return std::make_pair(t0, t1);
    }
    case Kind::interval:
    case Kind::mapped: return slab(d.box, slack);
  }
  return std::nullopt;
}

bool Domain::is_convex(double tol) const {
  switch (impl_->kind) {
    case Kind::interval:
    case Kind::disc:
    case Kind::polygon: return true;
    case Kind::union_of: return false;
    default: break;
  }
  const auto v = outline(512);
  const std::size_t n = v.size();
  if (n < 3) return true;
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(v[i], v[(i + 1) % n]);
  const double sign = area2 >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = v[(i + 1) % n] - v[i];
    const Vec2 e2 = v[(i + 2) % n] - v[(i + 1) % n];
    const double l = e1.norm() * e2.norm();
    if (l == 0.0) continue;
    if (sign * cross(e1, e2) < -tol * l) return false;
  }
  return true;
}

Vec2 Domain::disc_center() const { return impl_->center; }
double Domain::disc_radius() const { return impl_->radius; }
const std::vector<Vec2>& Domain::vertices() const { return impl_->vertices; }
const Domain& Domain::base() const { return *impl_->base; }
const PlaneMap& Domain::forward() const { return *impl_->forward; }
const std::vector<Domain>& Domain::parts() const { return impl_->parts; }

json Domain::to_json() const {
  const Impl& d = *impl_;
  switch (d.kind) {
    case Kind::interval: return {{"kind", "interval"}, {"a", d.a}, {"b", d.b}};
    case Kind::disc: return {{"kind", "disc"}, {"center", vec_json(d.center)}, {"radius", d.radius}};
    case Kind::polygon: {
      json verts = json::array();
      for (const auto& v : d.vertices) verts.push_back(vec_json(v));
      return {{"kind", "polygon"}, {"vertices", verts}};
    }
    case Kind::mapped: return {{"kind", "mapped"}, {"base", d.base->to_json()}, {"map", d.forward->to_json()}};
    case Kind::intersection: {
      json parts = json::array();
      for (const auto& p : d.parts) parts.push_back(p.to_json());
      return {{"kind", "intersection"}, {"parts", parts}};
    }
    case Kind::union_of: {
      json parts = json::array();
      for (const auto& p : d.parts) parts.push_back(p.to_json());
      return {{"kind", "union"}, {"parts", parts}};
    }
  }
  return {};
}

Domain Domain::from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "interval") return interval(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "disc") return disc(vec_from(j.at("center")), j.at("radius").get<double>());
    if (kind == "polygon") {
      std::vector<Vec2> v;
      for (const auto& p : j.at("vertices")) v.push_back(vec_from(p));
      return polygon(std::move(v));
    }
    if (kind == "mapped") return mapped(from_json(j.at("base")), PlaneMap::from_json(j.at("map")));
    if (kind == "intersection") {
      std::vector<Domain> parts;
      for (const auto& p : j.at("parts")) parts.push_back(from_json(p));
      return intersection(std::move(parts));
    }
    if (kind == "union") {
      std::vector<Domain> parts;
      for (const auto& p : j.at("parts")) parts.push_back(from_json(p));
      return union_of(std::move(parts));
    }
    throw Error(ErrorCode::schema_error, "unknown domain kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, std::string("malformed domain: ") + e.what());
  }
}

bool interiors_disjoint(const Domain& a, const Domain& b) {
  using K = Domain::Kind;
  if (a.kind() == K::union_of || b.kind() == K::union_of) {
    const auto& pa = a.kind() == K::union_of ? a.parts() : std::vector<Domain>{a};
    const auto& pb = b.kind() == K::union_of ? b.parts() : std::vector<Domain>{b};
    for (const auto& x : pa)
      for (const auto& y : pb)
        if (!interiors_disjoint(x, y)) return false;
    return true;
  }
  const double tol = 1e-9 * std::max(a.scale(), b.scale());
  const Box ba = a.bounds(), bb = b.bounds();
  if (a.dimension() == 1 && b.dimension() == 1) {
    return std::max(ba.lo.x(), bb.lo.x()) >= std::min(ba.hi.x(), bb.hi.x()) - tol;
  }
  if (ba.lo.x() >= bb.hi.x() - tol || bb.lo.x() >= ba.hi.x() - tol || ba.lo.y() >= bb.hi.y() - tol ||
      bb.lo.y() >= ba.hi.y() - tol) {
    return true;
  }
  const bool simple_a = a.kind() == K::disc || a.kind() == K::polygon;
  const bool simple_b = b.kind() == K::disc || b.kind() == K::polygon;
  if (simple_a && simple_b) {
    if (a.kind() == K::disc && b.kind() == K::disc) {
      return (a.disc_center() - b.disc_center()).norm() >= a.disc_radius() + b.disc_radius() - tol;
    }
    if (a.kind() == K::polygon && b.kind() == K::polygon) return separation(a.vertices(), b.vertices()) >= -tol;
    const Domain& disc = a.kind() == K::disc ? a : b;
    const Domain& poly = a.kind() == K::disc ? b : a;
    const Vec2 c = disc.disc_center();
    if (polygon_contains(poly.vertices(), c, 0.0)) return false;
    double dist = INFINITY;
    const auto& v = poly.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) dist = std::min(dist, point_segment_distance(c, v[i], v[(i + 1) % v.size()]));
    return dist >= disc.disc_radius() - tol;
  }
  const auto oa = a.outline(1024), ob = b.outline(1024);
  if (a.is_convex() && b.is_convex() && oa.size() >= 3 && ob.size() >= 3 && separation(oa, ob) >= -tol) return true;
  for (const auto& p : halton_points(a, 400))
    if (b.contains(p, -tol)) return false;
  for (const auto& p : halton_points(b, 400))
    if (a.contains(p, -tol)) return false;
  return true;
}

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

std::vector<Vec2> halton_points(const Domain& d, int count, int skip) {
  std::vector<Vec2> out;
  if (count <= 0) return out;
  out.reserve(count);
  const Box b = d.bounds();
  if (d.dimension() == 1) {
    for (unsigned i = 0; static_cast<int>(out.size()) < count && i < 1000u * count; ++i) {
      const Vec2 p(b.lo.x() + radical_inverse(i + skip, 2) * (b.hi.x() - b.lo.x()), 0.0);
      if (d.contains(p, 0.0)) out.push_back(p);
    }
    return out;
  }
  for (unsigned i = 0; static_cast<int>(out.size()) < count && i < 1000u * count; ++i) {
    const Vec2 p(b.lo.x() + radical_inverse(i + skip, 2) * (b.hi.x() - b.lo.x()),
                 b.lo.y() + radical_inverse(i + skip, 3) * (b.hi.y() - b.lo.y()));
    if (d.contains(p, 0.0)) out.push_back(p);
  }
  return out;
}

}  // namespace periscope
