#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "periscope/calculus.hpp"
#include "periscope/field.hpp"
#include "periscope/plane_map.hpp"

using namespace periscope;

namespace {

ScalarField field(const std::string& s) { return ScalarField::parse(s); }

PlaneMap map_of(const std::string& f1, const std::string& f2, const Domain& d) {
  return PlaneMap::analytic(field(f1), field(f2), d);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("curl deficit") {
  Domain unit = Domain::disc(Vec2::Zero(), 1.0);
  CHECK(curl_deficit(PlaneMap::translation(Vec2(3, 0), unit), unit) == 0.0);
  CHECK(curl_deficit(PlaneMap::linear(2.0 * Mat2::Identity(), Vec2::Zero(), unit), unit) == 0.0);
  CHECK(curl_deficit(PlaneMap::rotation(M_PI / 2, unit), unit, 32) == doctest::Approx(2.0).epsilon(1e-12));
  Domain far = Domain::disc(Vec2(5, 5), 1.0);
  CHECK(code_of([&] { curl_deficit(PlaneMap::rotation(0.3, unit), far); }) == ErrorCode::domain_error);
}

TEST_CASE("potential from gradient") {
  Domain d = Domain::disc(Vec2::Zero(), 2.0);
  ScalarField g = potential_from_gradient(map_of("3", "0", d), Vec2::Zero());
  CHECK(g.value(Vec2(0.7, -1.1)) == doctest::Approx(2.1).epsilon(1e-12));
  g = potential_from_gradient(PlaneMap::identity(d), Vec2::Zero());
  CHECK(g.value(Vec2(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  g = potential_from_gradient(map_of("x2", "x1", Domain::disc(Vec2::Zero(), 3.0)), Vec2::Zero());
  CHECK(g.value(Vec2(1, 2)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(code_of([&] { potential_from_gradient(PlaneMap::rotation(0.5, d), Vec2::Zero()); }) ==
        ErrorCode::not_a_gradient);
}

TEST_CASE("potential round trip on random interior points") {
  Domain d = Domain::disc(Vec2(0.5, -0.2), 1.0);
  // grad of sin(x1) x2 + x1^3 / 3 + exp(x2)
  PlaneMap grad = map_of("cos(x1)*x2 + x1^2", "sin(x1) + exp(x2)", d);
  ScalarField g = potential_from_gradient(grad, d.center());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int i = 0; i < 100; ++i) {
    Vec2 x = d.center() + Vec2(u(rng), u(rng));
    CHECK((g.gradient(x) - grad(x)).norm() <= 1e-7);
  }
}

TEST_CASE("polynomial gradients match central differences") {
  ScalarField p = field("0.3*x1^4 - x1*x2^3 + 2*x1^2*x2 - x2 + 1");
  const double h = std::cbrt(std::numeric_limits<double>::epsilon());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    Vec2 x(u(rng), u(rng));
    Vec2 fd((p.value(x + Vec2(h, 0)) - p.value(x - Vec2(h, 0))) / (2 * h),
            (p.value(x + Vec2(0, h)) - p.value(x - Vec2(0, h))) / (2 * h));
    CHECK((fd - p.gradient(x)).norm() <= 1e-6);
    Mat2 hfd;
    hfd.col(0) = (p.gradient(x + Vec2(h, 0)) - p.gradient(x - Vec2(h, 0))) / (2 * h);
    hfd.col(1) = (p.gradient(x + Vec2(0, h)) - p.gradient(x - Vec2(0, h))) / (2 * h);
    CHECK((hfd - p.hessian(x)).norm() <= 1e-6);
  }
}

TEST_CASE("invert map") {
  Domain d = Domain::disc(Vec2::Zero(), 5.0);
  CHECK((invert_map(PlaneMap::translation(Vec2(3, 0), d), Vec2(4, 1), Vec2::Zero()) - Vec2(1, 1)).norm() < 1e-12);
  CHECK((invert_map(PlaneMap::linear(2.0 * Mat2::Identity(), Vec2::Zero(), d), Vec2(6, 0), Vec2::Zero()) -
         Vec2(3, 0))
            .norm() < 1e-12);
  PlaneMap exp_scaling = map_of("exp(x2)*x1", "exp(x2)*x2", Domain::disc(Vec2::Zero(), 1.0));
  Vec2 y = exp_scaling(Vec2(0.1, 0.2));
  CHECK((invert_map(exp_scaling, y, Vec2::Zero()) - Vec2(0.1, 0.2)).norm() <= 1e-11);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 200; ++i) {
    Vec2 x(u(rng), u(rng));
    CHECK((invert_map(exp_scaling, exp_scaling(x), Vec2::Zero()) - x).norm() <= 1e-10);
  }

  PlaneMap fold = map_of("x1^2", "x2", d);
  CHECK(code_of([&] { invert_map(fold, Vec2(1, 0), Vec2(0, 0)); }) == ErrorCode::singular_jacobian);
}

TEST_CASE("orientation classes") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  CHECK(orientation(PlaneMap::linear(Vec2(-1, 1).asDiagonal(), Vec2::Zero(), d), d) == Orientation::reversing);
  CHECK(orientation(PlaneMap::identity(d), d) == Orientation::preserving);
  CHECK(orientation(map_of("x1^2", "x2", d), d) == Orientation::mixed);
}

TEST_CASE("sampled diffeomorphism check") {
  Domain d = Domain::disc(Vec2::Zero(), 1.0);
  CHECK(is_sampled_diffeomorphism(PlaneMap::rotation(0.4, d), d));
  CHECK_FALSE(is_sampled_diffeomorphism(map_of("x1^2", "x2", d), d));
}

TEST_CASE("domain disjointness agrees with point sampling") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_real_distribution<double> r(0.2, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    Domain a = Domain::disc(Vec2(u(rng), u(rng)), r(rng));
    Vec2 c(u(rng), u(rng));
    double s = r(rng);
    Domain b = Domain::polygon({c + Vec2(-s, -s), c + Vec2(s, -s), c + Vec2(s, s), c + Vec2(-s, s)});
    bool sym = interiors_disjoint(a, b);
    CHECK(sym == interiors_disjoint(b, a));
    bool brute_overlap = false;
    for (int i = 0; i < 10000 && !brute_overlap; ++i) {
      Vec2 p = Vec2(u(rng), u(rng)) * 1.5;
      brute_overlap = a.contains(p, -1e-9) && b.contains(p, -1e-9);
    }
    if (brute_overlap) CHECK_FALSE(sym);
    // Sampling can miss a sliver of overlap; only contradictions are errors.
  }
}
