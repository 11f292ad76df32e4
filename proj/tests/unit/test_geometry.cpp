#include <doctest.h>

#include <cmath>
#include <random>

#include "periscope/geometry.hpp"
#include "periscope/mirror.hpp"

using namespace periscope;

TEST_CASE("reflect reverses normal incidence") {
  Vec3 r = reflect(Vec3(0, 0, 1), Vec3(0, 0, 1));
  CHECK((r - Vec3(0, 0, -1)).norm() == doctest::Approx(0.0));
  Vec2 r2 = reflect(Vec2(0, 1), Vec2(0, 1));
  CHECK((r2 - Vec2(0, -1)).norm() == doctest::Approx(0.0));
}

TEST_CASE("reflect off a tilted plane matches the closed form") {
  // grad Phi1 = (1, 0): v' = (2 grad, -1 + |grad|^2) / (1 + |grad|^2)
  Vec3 r = reflect(Vec3(0, 0, 1), Vec3(-1, 0, 1));
  CHECK((r - Vec3(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("zero normal is rejected") {
  try {
    reflect(Vec3(0, 0, 1), Vec3::Zero());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_normal);
  }
}

TEST_CASE("reflection law properties on random inputs") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 1000; ++i) {
    Vec3 v = Vec3(n01(rng), n01(rng), n01(rng)).normalized();
    Vec3 n(n01(rng), n01(rng), n01(rng));
    Vec3 r = reflect(v, n);
    CHECK(std::abs(r.norm() - 1.0) <= 1e-12);
    CHECK((reflect(r, n) - v).norm() <= 1e-12);
    Vec3 u = n.normalized();
    CHECK(std::abs(v.dot(u) + r.dot(u)) <= 1e-12);
    CHECK((r - v).cross(u).norm() <= 1e-12);
  }
}

TEST_CASE("segment slope") {
  CHECK(segment_slope(Vec3(0, 0, 0), Vec3(1, 0, -1)) == doctest::Approx(-1.0));
  CHECK(segment_slope(Vec3(0, 0, 1), Vec3(3, 4, 1)) == 0.0);
  CHECK(segment_slope(Vec3(1, 1, 0), Vec3(1, 1, 2)) == kInfiniteSlope);
  CHECK(segment_slope(Vec3(1, 1, 0), Vec3(1, 1, -2)) == -kInfiniteSlope);
}

TEST_CASE("ray patch intersections") {
  Jet bowl(2);
  bowl(2, 0) = 0.5;
  bowl(0, 2) = 0.5;
  MirrorPatch paraboloid(Domain::disc(Vec2::Zero(), 1.0), ScalarField::polynomial(bowl), "p");

  auto hit = intersect_ray_patch(Ray(Vec3(0, 0, -1), kUp), paraboloid, 0.0);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hit->point.norm() < 1e-12);

  hit = intersect_ray_patch(Ray(Vec3(0.5, 0, -1), kUp), paraboloid, 0.0);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.125).epsilon(1e-12));
  CHECK((hit->point - Vec3(0.5, 0, 0.125)).norm() < 1e-10);
  Vec3 expected_normal = Vec3(-0.5, 0, 1).normalized();
  CHECK((hit->normal - expected_normal).norm() < 1e-12);

  // Outside the base domain.
  CHECK_FALSE(intersect_ray_patch(Ray(Vec3(1.5, 0, -1), kUp), paraboloid, 0.0));
  // Already past the surface.
  CHECK_FALSE(intersect_ray_patch(Ray(Vec3(0.5, 0, 1), kUp), paraboloid, 0.0));
}

TEST_CASE("flat one-dimensional patch") {
  MirrorPatch flat(Domain::interval(-1, 1), ScalarField::constant(0.0), "flat");
  auto hit = intersect_ray_patch(Vec2(0.2, -1), Vec2(0, 1), flat, 0.0);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.0));
  CHECK((hit->point - Vec2(0.2, 0)).norm() < 1e-12);
  CHECK((hit->normal - Vec2(0, 1)).norm() < 1e-12);
}

TEST_CASE("oblique rays land on the graph") {
  Jet saddle(3);
  saddle(2, 0) = 0.3;
  saddle(0, 2) = -0.2;
  saddle(1, 1) = 0.1;
  saddle(3, 0) = 0.05;
  MirrorPatch patch(Domain::disc(Vec2::Zero(), 2.0), ScalarField::polynomial(saddle), "s");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    Vec3 o(u(rng), u(rng), -3.0);
    Vec3 d(0.3 * u(rng), 0.3 * u(rng), 1.0);
    auto hit = intersect_ray_patch(Ray(o, d), patch, 0.0);
    if (!hit) continue;
    ++hits;
    CHECK(std::abs(patch.height().value(horizontal(hit->point)) - hit->point.z()) <= 1e-10);
  }
  CHECK(hits > 150);
}
