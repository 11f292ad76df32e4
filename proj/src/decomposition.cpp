#include "periscope/decomposition.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "periscope/calculus.hpp"

namespace periscope {

using nlohmann::json;

namespace {

Mat2 outer(const Vec2& n) { return n * n.transpose(); }

Mat2 symmetric(double p, double q, double r) {
  Mat2 m;
  m << p, q, q, r;
  return m;
}

// Null directions of the indefinite form n^T M n, or nothing when M is not indefinite.
std::optional<std::pair<Vec2, Vec2>> null_directions(const Mat2& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  const double l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
  const double scale = std::max(1e-300, std::max(std::abs(l1), std::abs(l2)));
  if (!(l1 < -tol * scale && l2 > tol * scale)) return std::nullopt;
  const Vec2 e1 = es.eigenvectors().col(0), e2 = es.eigenvectors().col(1);
  const Vec2 a = std::sqrt(l2) * e1 + std::sqrt(-l1) * e2;
  const Vec2 b = std::sqrt(l2) * e1 - std::sqrt(-l1) * e2;
  return std::make_pair(a.normalized(), b.normalized());
}

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace

LinearFactors factor_linear(const Mat2& f) {
  const double norm = f.norm();
  if (!(std::abs(f.determinant()) > 1e-14 * norm * norm)) throw Error(ErrorCode::singular_matrix, "matrix is singular");
  if (std::abs(f(0, 1) - f(1, 0)) <= 1e-15 * norm) {
    return {0.5 * (f + f.transpose()), Mat2::Identity()};
  }
  // Symmetric X = [[p, q], [q, r]] with X F symmetric form the plane w . (p, q, r) = 0.
  const Eigen::Vector3d w(f(0, 1), f(1, 1) - f(0, 0), -f(1, 0));
  Mat2 x;
  // Rank-one members n n^T of that plane: F12 a^2 + (F22 - F11) a b - F21 b^2 = 0.
  const auto dirs = null_directions(symmetric(w(0), 0.5 * w(1), w(2)), 1e-12);
  if (dirs) {
    x = outer(dirs->first) + outer(dirs->second);
  } else {
    Eigen::Vector3d b1 = w.unitOrthogonal();
    Eigen::Vector3d b2 = w.normalized().cross(b1);
    double best = -1.0;
    for (int k = 0; k < 180; ++k) {
      const double th = std::numbers::pi * k / 180.0;
      const Eigen::Vector3d v = std::cos(th) * b1 + std::sin(th) * b2;
      const Mat2 cand = symmetric(v(0), v(1), v(2));
      const double quality = std::abs(cand.determinant()) / cand.squaredNorm();
      if (quality > best) {
        best = quality;
        x = cand;
      }
    }
  }
  const Mat2 s1 = x * f;
  return {0.5 * (s1 + s1.transpose()), x.inverse()};
}

std::string_view to_string(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::hyperbolic: return "hyperbolic";
    case Hyperbolicity::degenerate: return "degenerate";
    default: return "elliptic";
  }
}

Hyperbolicity hyperbolicity(const Mat2& j) {
  const double disc = j.trace() * j.trace() - 4.0 * j.determinant();
  const double tol = 1e-10 * std::max(1.0, j.squaredNorm());
  if (disc > tol) return Hyperbolicity::hyperbolic;
  if (disc >= -tol) return Hyperbolicity::degenerate;
  return Hyperbolicity::elliptic;
}

Hyperbolicity hyperbolicity(const PlaneMap& f, const Vec2& x0) { return hyperbolicity(f.jacobian(x0)); }

PDECoefficients::PDECoefficients(PlaneMap f, const Vec2& guess) : f_(std::move(f)), guess_(guess) {}

Eigen::Vector3d PDECoefficients::from_jacobian(const Mat2& j) {
  return {j(0, 1), j(1, 1) - j(0, 0), -j(1, 0)};
}

Eigen::Vector3d PDECoefficients::at(const Vec2& xi) const {
  return from_jacobian(f_.jacobian(invert_map(f_, xi, guess_)));
}

std::pair<Vec2, Vec2> characteristic_directions(const Eigen::Vector3d& abc) {
  // A dy^2 - B dx dy + C dx^2 as a quadratic form in (dx, dy).
  const auto dirs = null_directions(symmetric(abc(2), -0.5 * abc(1), abc(0)), 1e-10);
  if (!dirs) {
    std::ostringstream os;
    os << "B^2 - 4AC = " << abc(1) * abc(1) - 4.0 * abc(0) * abc(2) << " is not positive";
    throw Error(ErrorCode::not_hyperbolic, os.str());
  }
  return *dirs;
}

std::pair<double, double> characteristic_slopes(const Eigen::Vector3d& abc) {
  const auto [a, b] = characteristic_directions(abc);
  auto slope = [](const Vec2& d) {
    if (d.x() == 0.0) return std::copysign(kInfiniteSlope, d.y());
    return d.y() / d.x();
  };
  return {slope(a), slope(b)};
}

std::vector<Vec2> integrate_characteristic(const PDECoefficients& coeffs, const Vec2& xi0, int family, double length,
                                           double tol) {
  const auto start = characteristic_directions(coeffs.at(xi0));
  Vec2 heading = (family == 0 ? start.first : start.second) * (length < 0.0 ? -1.0 : 1.0);
  auto field = [&](const Vec2& p, const Vec2& prev) {
    const auto [a, b] = characteristic_directions(coeffs.at(p));
    const Vec2 d = std::abs(a.dot(prev)) >= std::abs(b.dot(prev)) ? a : b;
    return d.dot(prev) < 0.0 ? Vec2(-d) : d;
  };
  auto rk4 = [&](const Vec2& p, double h, const Vec2& prev) {
    const Vec2 k1 = field(p, prev);
    const Vec2 k2 = field(p + 0.5 * h * k1, k1);
    const Vec2 k3 = field(p + 0.5 * h * k2, k2);
    const Vec2 k4 = field(p + h * k3, k3);
    return Vec2(p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  std::vector<Vec2> pts{xi0};
  const double total = std::abs(length);
  double s = 0.0, h = total / 16.0;
  Vec2 p = xi0;
  while (s < total && h > 1e-14 * (1.0 + total)) {
    h = std::min(h, total - s);
    const Vec2 one = rk4(p, h, heading);
    const Vec2 half = rk4(p, 0.5 * h, heading);
    const Vec2 two = rk4(half, 0.5 * h, field(half, heading));
    const double err = (two - one).norm();
    if (err <= tol) {
      heading = field(two, heading);
      p = two;
      s += h;
      pts.push_back(p);
      if (err < tol / 32.0) h *= 2.0;
    } else {
      h *= 0.5;
    }
  }
  if (s < total) throw Error(ErrorCode::numerical_failure, "characteristic step size underflow");
  return pts;
}

PlaneMap DecompositionResult::grad_u(const Domain& source) const { return PlaneMap::gradient_of(u, false, source); }

json DecompositionResult::to_json() const {
  return {{"center", {center.x(), center.y()}},
          {"image_center", {image_center.x(), image_center.y()}},
          {"radius", radius},
          {"residual", residual},
          {"hessian_condition", hessian_condition},
          {"degree", degree},
          {"u", u.to_json()},
          {"phi", phi.to_json()}};
}

namespace {

// Order-k coefficients of a jet as a vector (i, k - i), i = 0..k.
Eigen::VectorXd layer(const Jet& j, int k) {
  Eigen::VectorXd v(k + 1);
  for (int i = 0; i <= k; ++i) v(i) = j(i, k - i);
  return v;
}

struct PdeJets {
  Jet a, b, c, eta1, eta2;
};

// A u_11(f) + B u_12(f) + C u_22(f) as a jet in x - x0.
Jet pde_residual(const PdeJets& p, const Jet& u) {
  const Jet u1 = u.derivative(0), u2 = u.derivative(1);
  const Jet u11 = u1.derivative(0), u12 = u1.derivative(1), u22 = u2.derivative(1);
  return p.a * u11.compose(p.eta1, p.eta2) + p.b * u12.compose(p.eta1, p.eta2) + p.c * u22.compose(p.eta1, p.eta2);
}

Jet solve_taylor(const PlaneMap& f, const Vec2& x0, const Vec2& xi0, const Mat2& hu, int n) {
  Jet u(n);
  u(2, 0) = 0.5 * hu(0, 0);
  u(1, 1) = hu(0, 1);
  u(0, 2) = 0.5 * hu(1, 1);
  if (n < 3) return u;
  auto [f1, f2] = f.expand(x0, n - 1);
  PdeJets p;
  p.a = f1.derivative(1);
  p.b = f2.derivative(1) - f1.derivative(0);
  p.c = -f2.derivative(0);
  p.eta1 = (f1 - xi0.x()).truncated(n - 2);
  p.eta2 = (f2 - xi0.y()).truncated(n - 2);
  p.eta1(0, 0) = 0.0;
  p.eta2(0, 0) = 0.0;
  for (int k = 3; k <= n; ++k) {
    const Eigen::VectorXd r = layer(pde_residual(p, u), k - 2);
    Eigen::MatrixXd m(k - 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      Jet basis(n);
      basis(i, k - i) = 1.0;
      m.col(i) = layer(pde_residual(p, basis), k - 2);
    }
    const Eigen::VectorXd sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(m).solve(-r);
    for (int i = 0; i <= k; ++i) u(i, k - i) = sol(i);
  }
  return u;
}

double third_derivative_norm(const PlaneMap& f, const Vec2& x0) {
  if (f.max_order() < 3) return 0.0;
  const auto [f1, f2] = f.expand(x0, 3);
  static const double kFact[4] = {1.0, 1.0, 2.0, 6.0};
  double m = 0.0;
  for (int i = 0; i <= 3; ++i) {
    const double w = kFact[i] * kFact[3 - i];
    m = std::max({m, std::abs(f1(i, 3 - i)) * w, std::abs(f2(i, 3 - i)) * w});
  }
  return m;
}

bool hessians_ok(const ScalarField& u, const PlaneMap& f, const std::vector<Vec2>& pts, double sign_u, double sign_phi) {
  for (const auto& x : pts) {
    const Mat2 hu = u.hessian(f(x));
    const Mat2 hphi_raw = hu * f.jacobian(x);
    const Mat2 hphi = 0.5 * (hphi_raw + hphi_raw.transpose());
    const double du = hu.determinant(), dphi = hphi.determinant();
    if (!(std::abs(du) >= 1e-8 * hu.squaredNorm()) || du * sign_u <= 0.0) return false;
    if (!(std::abs(dphi) >= 1e-8 * hphi.squaredNorm()) || dphi * sign_phi <= 0.0) return false;
  }
  return true;
}

}  // namespace

DecompositionResult decompose_local(const PlaneMap& f, const Vec2& x0, const DecomposeOptions& opts) {
  const Mat2 j0 = f.jacobian(x0);
  const Hyperbolicity kind = hyperbolicity(j0);
  if (kind != Hyperbolicity::hyperbolic) {
    std::ostringstream os;
    os << "(tr J)^2 - 4 det J = " << j0.trace() * j0.trace() - 4.0 * j0.determinant() << " at (" << x0.x() << ", "
       << x0.y() << ") is " << to_string(kind) << "; no local factorization into gradient maps with nondegenerate"
       << " Hessians exists there";
    throw Error(ErrorCode::not_hyperbolic, os.str());
  }
  const int n = std::max(2, std::min(opts.degree, f.max_order() + 1));
  const Vec2 xi0 = f(x0);

  // Second derivatives: unit Hessian in characteristic coordinates.
  const auto [d1, d2] = characteristic_directions(PDECoefficients::from_jacobian(j0));
  const Mat2 hu = outer(perp(d1)) + outer(perp(d2));
  const double det_u = hu.determinant();
  if (!(std::abs(det_u) >= 1e-8 * hu.squaredNorm())) {
    throw Error(ErrorCode::hessian_degenerate, "characteristic directions are nearly parallel");
  }
  const Mat2 hphi0 = hu * j0;
  const double sign_u = det_u > 0.0 ? 1.0 : -1.0;
  const double sign_phi = hphi0.determinant() > 0.0 ? 1.0 : -1.0;

  DecompositionResult res;
  res.center = x0;
  res.image_center = xi0;
  res.degree = n;
  res.u = ScalarField::polynomial(solve_taylor(f, x0, xi0, hu, n), xi0);
  Eigen::SelfAdjointEigenSolver<Mat2> es(hu);
  res.hessian_condition = es.eigenvalues().cwiseAbs().maxCoeff() / es.eigenvalues().cwiseAbs().minCoeff();

  const double scale = std::max(1.0, x0.norm());
  double r = opts.initial_radius ? *opts.initial_radius : 0.1 / (1.0 + third_derivative_norm(f, x0));
  std::string last_reason = "no radius tried";
  for (int halving = 0; halving <= opts.max_halvings; ++halving, r *= 0.5) {
    if (r < 1e-6 * scale || (opts.minimum_radius && r < *opts.minimum_radius)) break;
    const Domain ball = Domain::disc(x0, r);
    const PlaneMap fb = f.with_source(ball);
    if (orientation(fb, ball, opts.samples) == Orientation::mixed) {
      last_reason = "Jacobian changes sign";
      continue;
    }
    const Domain image = Domain::mapped(ball, fb);
    const PlaneMap grad_phi = PlaneMap::compose(res.grad_u(image), fb);
    const double deficit = curl_deficit(grad_phi, ball, opts.samples);
    if (!(deficit <= opts.tolerance)) {
      std::ostringstream os;
      os << "curl deficit " << deficit;
      last_reason = os.str();
      continue;
    }
    auto pts = grid_points(ball, opts.samples);
    for (const auto& p : ball.boundary_points(4 * opts.samples)) pts.push_back(p);
    if (!hessians_ok(res.u, fb, pts, sign_u, sign_phi)) {
      last_reason = "Hessian degenerates inside the disc";
      continue;
    }
    if (!image.is_convex() || !Domain::mapped(ball, grad_phi).is_convex()) {
      last_reason = "image is not convex";
      continue;
    }
    res.radius = r;
    res.residual = deficit;
    res.phi = ScalarField::potential(grad_phi, x0);
    return res;
  }
  throw Error(ErrorCode::radius_underflow, "no admissible radius down to " + std::to_string(r) + " (" + last_reason + ")");
}

}  // namespace periscope
