#include <doctest.h>

#include <cmath>
#include <random>

#include "periscope/calculus.hpp"
#include "periscope/decomposition.hpp"

using namespace periscope;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::invalid_argument;
}

void check_factors(const Mat2& f) {
  LinearFactors lf = factor_linear(f);
  CHECK((lf.s2 * lf.s1 - f).norm() <= 1e-12 * std::max(1.0, f.norm()));
  CHECK(lf.s1(0, 1) == lf.s1(1, 0));
  CHECK(lf.s2(0, 1) == lf.s2(1, 0));
  CHECK(std::abs(lf.s1.determinant()) > 0.0);
  CHECK(std::abs(lf.s2.determinant()) > 0.0);
}

PlaneMap expr_map(const std::string& f1, const std::string& f2, const Domain& d) {
  return PlaneMap::analytic(ScalarField::parse(f1), ScalarField::parse(f2), d);
}

}  // namespace

TEST_CASE("symmetric matrices factor trivially") {
  for (Mat2 f : {Mat2(Vec2(1, -1).asDiagonal()), Mat2((Mat2() << 0, 1, 1, 0).finished())}) {
    LinearFactors lf = factor_linear(f);
    CHECK(lf.s1 == f);
    CHECK(lf.s2 == Mat2::Identity());
  }
}

TEST_CASE("shear and random matrices reassemble") {
  check_factors((Mat2() << 1, 1, 0, 1).finished());
  check_factors((Mat2() << 0, 1, 2, 0).finished());
  check_factors((Mat2() << 0, -1, 1, 0).finished());
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3, 3);
  int done = 0;
  while (done < 1000) {
    Mat2 f;
    f << u(rng), u(rng), u(rng), u(rng);
    if (std::abs(f.determinant()) < 1e-3) continue;
    check_factors(f);
    ++done;
  }
  CHECK(code_of([] { factor_linear(Mat2::Zero()); }) == ErrorCode::singular_matrix);
}

TEST_CASE("hyperbolicity classes") {
  CHECK(hyperbolicity(Mat2(Vec2(-1, 1).asDiagonal())) == Hyperbolicity::hyperbolic);
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  PlaneMap exp_scaling = expr_map("exp(x2)*x1", "exp(x2)*x2", d);
  CHECK(hyperbolicity(exp_scaling, Vec2::Zero()) == Hyperbolicity::degenerate);
  CHECK(hyperbolicity(PlaneMap::rotation(M_PI / 2, d), Vec2::Zero()) == Hyperbolicity::elliptic);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 1000; ++i) {
    Mat2 f;
    f << u(rng), u(rng), u(rng), u(rng);
    if (f.determinant() >= 0) f.row(0) *= -1;
    if (f.determinant() < 0) CHECK(hyperbolicity(f) == Hyperbolicity::hyperbolic);
  }
}

TEST_CASE("characteristic slopes") {
  auto [a, b] = characteristic_slopes(Eigen::Vector3d(1, 0, -1));
  CHECK(std::min(a, b) == doctest::Approx(-1.0));
  CHECK(std::max(a, b) == doctest::Approx(1.0));

  Eigen::Vector3d sigma = PDECoefficients::from_jacobian(Mat2(Vec2(-1, 1).asDiagonal()));
  CHECK(sigma(0) == 0.0);
  CHECK(sigma(1) == 2.0);
  CHECK(sigma(2) == 0.0);
  auto [d0, d1] = characteristic_directions(sigma);
  CHECK(std::abs(d0.x() * d0.y()) < 1e-15);
  CHECK(std::abs(d1.x() * d1.y()) < 1e-15);
  CHECK(std::abs(d0.dot(d1)) < 1e-15);

  CHECK(code_of([] { characteristic_directions(Eigen::Vector3d(1, 0, 1)); }) == ErrorCode::not_hyperbolic);
}

TEST_CASE("characteristic curves follow the null directions") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  PlaneMap f = expr_map("-x1 + 0.2*x2^2", "x2 + 0.1*x1^2", d);
  PDECoefficients coeffs(f, Vec2::Zero());
  std::vector<Vec2> curve = integrate_characteristic(coeffs, f(Vec2::Zero()), 0, 0.2);
  REQUIRE(curve.size() >= 2);
  // Oracle: forward Euler on the same direction field with a tiny step.
  Vec2 p = curve.front();
  Vec2 heading = characteristic_directions(coeffs.at(p)).first;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    auto [a, b] = characteristic_directions(coeffs.at(p));
    Vec2 dir = std::abs(a.dot(heading)) >= std::abs(b.dot(heading)) ? a : b;
    if (dir.dot(heading) < 0) dir = -dir;
    heading = dir;
    p += (0.2 / steps) * dir;
  }
  CHECK((p - curve.back()).norm() <= 1e-5);
  CHECK((curve.back() - curve.front()).norm() > 0.15);
}

TEST_CASE("already a gradient") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  Mat2 m = Vec2(1, -1).asDiagonal();
  PlaneMap f = PlaneMap::linear(m, Vec2::Zero(), d);
  DecompositionResult r = decompose_local(f, Vec2(0.1, 0.2));
  CHECK((r.u.hessian(r.image_center) - Mat2::Identity()).norm() <= 1e-10);
  CHECK((r.phi.gradient(Vec2(0.12, 0.18)) - r.u.gradient(f(Vec2(0.12, 0.18)))).norm() <= 1e-10);
}

TEST_CASE("linear map agrees with the factor oracle") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  Mat2 m;
  m << 0, 1, 2, 0;
  PlaneMap f = PlaneMap::linear(m, Vec2::Zero(), d);
  DecompositionResult r = decompose_local(f, Vec2::Zero());
  LinearFactors lf = factor_linear(m);
  CHECK(r.radius > 0.0);
  CHECK(r.residual <= 1e-8);
  // grad phi = S1 x and grad u = S2^-1 xi.
  for (Vec2 x : {Vec2(0.0, 0.0), Vec2(0.5 * r.radius, 0.0), Vec2(0.0, -0.7 * r.radius)}) {
    CHECK((r.phi.gradient(x) - r.phi.gradient(Vec2::Zero()) - lf.s1 * x).norm() <= 1e-8);
    Vec2 xi = f(x);
    CHECK((r.u.gradient(xi) - r.u.gradient(Vec2::Zero()) - lf.s2.inverse() * xi).norm() <= 1e-8);
  }
}

TEST_CASE("nonlinear reversing map decomposes") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  PlaneMap f = expr_map("-x1 + 0.3*x2^2 + 0.1*x1*x2", "x2 + 0.2*x1^2", d);
  DecomposeOptions opts;
  opts.tolerance = 1e-7;
  DecompositionResult r = decompose_local(f, Vec2(0.1, -0.1), opts);
  REQUIRE(r.radius > 0.0);
  CHECK(r.residual <= opts.tolerance);

  PlaneMap grad_u_of_f = PlaneMap::compose(r.grad_u(d), f);
  std::vector<Vec2> pts = halton_points(Domain::disc(r.center, r.radius), 500);
  double worst = 0.0, pde = 0.0;
  PDECoefficients coeffs(f, r.center);
  for (const Vec2& x : pts) {
    worst = std::max(worst, (grad_u_of_f(x) - r.phi.gradient(x)).norm());
    Vec2 xi = f(x);
    Mat2 hu = r.u.hessian(xi);
    Eigen::Vector3d abc = PDECoefficients::from_jacobian(f.jacobian(x));
    pde = std::max(pde, std::abs(abc(0) * hu(0, 0) + abc(1) * hu(0, 1) + abc(2) * hu(1, 1)) / hu.norm());
  }
  CHECK(worst <= 10 * opts.tolerance);
  CHECK(pde <= opts.tolerance);
  (void)coeffs;
}

TEST_CASE("exp(x2) scaling is rejected at the origin") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  PlaneMap exp_scaling = expr_map("exp(x2)*x1", "exp(x2)*x2", d);
  CHECK(code_of([&] { decompose_local(exp_scaling, Vec2::Zero()); }) == ErrorCode::not_hyperbolic);
  CHECK(code_of([&] { decompose_local(PlaneMap::rotation(0.1, d), Vec2::Zero()); }) == ErrorCode::not_hyperbolic);
}
