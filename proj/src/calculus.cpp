#include "periscope/calculus.hpp"

#include <cmath>

#include "periscope/error.hpp"

namespace periscope {

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::reversing: return "reversing";
    case Orientation::preserving: return "preserving";
    default: return "mixed";
  }
}

std::vector<Vec2> grid_points(const Domain& region, int samples) {
  const Box b = region.bounds();
  std::vector<Vec2> pts;
  const int n = std::max(samples, 2);
  if (region.dimension() == 1) {
    for (int i = 0; i < n; ++i) pts.emplace_back(b.lo.x() + (b.hi.x() - b.lo.x()) * i / (n - 1), 0.0);
    return pts;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p(b.lo.x() + (b.hi.x() - b.lo.x()) * i / (n - 1), b.lo.y() + (b.hi.y() - b.lo.y()) * j / (n - 1));
      if (region.contains(p)) pts.push_back(p);
    }
  }
  if (pts.empty()) pts.push_back(region.center());
  return pts;
}

double curl_deficit(const PlaneMap& m, const Domain& region, int samples) {
  const double tol = 1e-6 * region.scale();
  for (const auto& p : region.boundary_points(16)) {
    if (!m.source().contains(p, tol)) throw Error(ErrorCode::domain_error, "region is not inside the map's source");
  }
  if (region.dimension() == 1) return 0.0;
  double worst = 0.0;
  for (const auto& p : grid_points(region, samples)) {
    const Mat2 j = m.jacobian(p);
    worst = std::max(worst, std::abs(j(0, 1) - j(1, 0)));
  }
  return worst;
}

ScalarField potential_from_gradient(const PlaneMap& m, const Vec2& base, double tolerance) {
  const double deficit = curl_deficit(m, m.source());
  if (!(deficit <= tolerance)) {
    throw Error(ErrorCode::not_a_gradient, "curl deficit " + std::to_string(deficit) + " exceeds tolerance");
  }
  if (m.kind() == "linear") {
    const Mat2 a = m.jacobian(base);
    const Vec2 b = m(Vec2::Zero());
    const Mat2 s = 0.5 * (a + a.transpose());
    // <b, x> + x^T S x / 2, shifted to vanish at base.
    Jet j(2);
    j(1, 0) = b.x() + (s * base).x();
    j(0, 1) = b.y() + (s * base).y();
    j(2, 0) = 0.5 * s(0, 0);
    j(0, 2) = 0.5 * s(1, 1);
    j(1, 1) = s(0, 1);
    return ScalarField::polynomial(j, base);
  }
  return ScalarField::potential(m, base);
}

Vec2 invert_map(const PlaneMap& m, const Vec2& y, const Vec2& guess, const InvertOptions& opts) {
  const double tol = opts.relative_tolerance * (1.0 + y.norm());
  Vec2 x = guess;
  Vec2 r = m(x) - y;
  double rn = r.norm();
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (!std::isfinite(rn)) break;
    const Mat2 j = m.jacobian(x);
    const double det = j.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-300) {
      throw Error(ErrorCode::singular_jacobian, "Jacobian is singular during inversion");
    }
    const Vec2 step = j.inverse() * r;
    double lambda = 1.0;
    Vec2 nx = x - step;
    Vec2 nr = m(nx) - y;
    while (!(nr.norm() < rn) && lambda > 1.0 / 1024.0) {
      lambda *= 0.5;
      nx = x - lambda * step;
      nr = m(nx) - y;
    }
    const bool converged = rn <= tol;
    if (nr.norm() < rn) {
      x = nx;
      r = nr;
      rn = nr.norm();
    } else if (converged) {
      return x;
    }
    // One extra step past the tolerance polishes to roundoff.
    if (converged) return x;
  }
  if (rn <= tol) return x;
  throw Error(ErrorCode::inversion_failure, "Newton inversion did not converge");
}

Orientation orientation(const PlaneMap& m, const Domain& region, int samples) {
  bool pos = false, neg = false;
  for (const auto& p : grid_points(region, samples)) {
    const double det = region.dimension() == 1 ? m.jacobian(p)(0, 0) : m.jacobian(p).determinant();
    if (det > 0.0) pos = true;
    else if (det < 0.0) neg = true;
    else return Orientation::mixed;
  }
  if (pos && neg) return Orientation::mixed;
  return neg ? Orientation::reversing : Orientation::preserving;
}

bool is_sampled_diffeomorphism(const PlaneMap& m, const Domain& region, int samples) {
  if (orientation(m, region, samples) == Orientation::mixed) return false;
  const auto pts = grid_points(region, samples);
  std::vector<Vec2> img;
  img.reserve(pts.size());
  for (const auto& p : pts) img.push_back(m(p));
  const double eps = 1e-12 * region.scale();
  for (std::size_t a = 0; a < img.size(); ++a)
    for (std::size_t b = a + 1; b < img.size(); ++b)
      if ((img[a] - img[b]).norm() <= eps) return false;
  return true;
}

double sampled_sup_norm(const PlaneMap& m, const Domain& region, int samples) {
  double sup = 0.0;
  for (const auto& p : grid_points(region, samples)) sup = std::max(sup, m(p).norm());
  for (const auto& p : region.boundary_points(4 * samples)) sup = std::max(sup, m(p).norm());
  return sup;
}

}  // namespace periscope
