#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "oracles.hpp"
#include "pointsim/geometry.hpp"
#include "pointsim/rng.hpp"

using namespace pointsim;
using geo::deg2rad;
using geo::rad2deg;
using geo::Vec3d;

namespace {

geo::RigidTransformd random_transform(Rng& rng) {
  const Eigen::Vector3d axis =
      Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian())
          .normalized();
  const double angle = rng.uniform(-M_PI, M_PI);
  geo::RigidTransformd a;
  a.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  a.translation = Vec3d(rng.uniform(-2000, 2000), rng.uniform(-2000, 2000),
                        rng.uniform(-2000, 2000));
  return a;
}

}  // namespace

TEST_CASE("direction_from_angles matches the trig mapping") {
  auto d = geo::direction_from_angles(0.0, 0.0);
  CHECK(d.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.z() == doctest::Approx(0.0).epsilon(1e-12));

  // Steep downward pointing, frozen from direct trig evaluation.
  d = geo::direction_from_angles(deg2rad(89.9), 0.0);
  CHECK(std::abs(d.x() - 1.7453283658983088e-3) < 1e-12);
  CHECK(std::abs(d.y()) < 1e-15);
  CHECK(std::abs(d.z() - (-0.9999984769132877)) < 1e-12);

  d = geo::direction_from_angles(deg2rad(30.0), deg2rad(45.0));
  CHECK(std::abs(d.x() - 0.6123724356957945) < 1e-12);
  CHECK(std::abs(d.y() - 0.6123724356957945) < 1e-12);
  CHECK(std::abs(d.z() - (-0.5)) < 1e-12);
}

TEST_CASE("direction_from_angles rejects pitch at or beyond 90 deg") {
  CHECK_THROWS_AS(geo::direction_from_angles(deg2rad(90.0), 0.0),
                  geo::PitchDomainError);
  CHECK_THROWS_AS(geo::direction_from_angles(deg2rad(-95.0), 0.0),
                  geo::PitchDomainError);
}

TEST_CASE("direction_from_angles is unit norm for all valid angles") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double pitch = deg2rad(rng.uniform(-89.9, 89.9));
    const double yaw = deg2rad(rng.uniform(-180.0, 180.0));
    CHECK(std::abs(geo::direction_from_angles(pitch, yaw).vec().norm() - 1.0) <
          1e-12);
  }
}

TEST_CASE("angles_from_direction inverts the mapping") {
  auto [pitch, yaw] = geo::angles_from_direction(geo::UnitVec3d(1, 0, 0));
  CHECK(pitch == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(yaw == doctest::Approx(0.0).epsilon(1e-12));

  auto [p2, y2] = geo::angles_from_direction(
      geo::UnitVec3d(0.6123724356957945, 0.6123724356957945, -0.5));
  CHECK(p2 == doctest::Approx(deg2rad(30.0)).epsilon(1e-12));
  CHECK(y2 == doctest::Approx(deg2rad(45.0)).epsilon(1e-12));

  CHECK_THROWS_AS(geo::angles_from_direction(geo::UnitVec3d(0, 0, -1)),
                  geo::DegenerateDirectionError);
  CHECK_THROWS_AS(geo::angles_from_direction(geo::UnitVec3d(0, 0, 1)),
                  geo::DegenerateDirectionError);
}

TEST_CASE("angle round trip over the valid range") {
  Rng rng(12);
  for (int i = 0; i < 5000; ++i) {
    const double pitch = deg2rad(rng.uniform(-89.9, 89.9));
    const double yaw = deg2rad(rng.uniform(-179.999, 180.0));
    const auto dir = geo::direction_from_angles(pitch, yaw);
    const auto [p, y] = geo::angles_from_direction(dir);
    CHECK(std::abs(p - pitch) < 1e-9);
    CHECK(std::abs(geo::wrap_angle(y - yaw)) < 1e-9);
    const auto dir2 = geo::direction_from_angles(p, y);
    CHECK((dir2.vec() - dir.vec()).norm() < 1e-9);
  }
}

TEST_CASE("transform_point applies rotation then translation") {
  const auto id = geo::RigidTransformd::identity();
  CHECK((geo::transform_point(id, Vec3d(1, 2, 3)) - Vec3d(1, 2, 3)).norm() ==
        0.0);

  const auto shift =
      geo::RigidTransformd::from_translation(Vec3d(10, 0, 0));
  CHECK((geo::transform_point(shift, Vec3d(1, 2, 3)) - Vec3d(11, 2, 3))
            .norm() == 0.0);

  geo::RigidTransformd quarter;
  quarter.rotation = geo::rot_z(deg2rad(90.0));
  CHECK((geo::transform_point(quarter, Vec3d(1, 0, 0)) - Vec3d(0, 1, 0))
            .norm() < 1e-12);
}

TEST_CASE("transform_direction ignores translation and preserves structure") {
  const auto shift =
      geo::RigidTransformd::from_translation(Vec3d(5, 5, 5));
  const auto v = geo::transform_direction(shift, geo::UnitVec3d(0, 1, 0));
  CHECK((v.vec() - Vec3d(0, 1, 0)).norm() < 1e-12);

  geo::RigidTransformd quarter;
  quarter.rotation = geo::rot_z(deg2rad(90.0));
  const auto w = geo::transform_direction(quarter, geo::UnitVec3d(1, 0, 0));
  CHECK((w.vec() - Vec3d(0, 1, 0)).norm() < 1e-12);

  // Norms and pairwise angles are preserved under random transforms.
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_transform(rng);
    a.validate();
    const auto u1 = geo::UnitVec3d::normalized(
        Vec3d(rng.gaussian(), rng.gaussian(), rng.gaussian()));
    const auto u2 = geo::UnitVec3d::normalized(
        Vec3d(rng.gaussian(), rng.gaussian(), rng.gaussian()));
    const auto t1 = geo::transform_direction(a, u1);
    const auto t2 = geo::transform_direction(a, u2);
    CHECK(std::abs(t1.vec().norm() - 1.0) < 1e-9);
    CHECK(std::abs(t1.vec().dot(t2.vec()) - u1.vec().dot(u2.vec())) < 1e-9);
  }
}

TEST_CASE("pointing_error basics") {
  // Target on the line.
  CHECK(geo::pointing_error(Vec3d(3, 0, 0), Vec3d(0, 0, 0), Vec3d(1, 0, 0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Perpendicular offset of 1.
  CHECK(geo::pointing_error(Vec3d(0, 1, 0), Vec3d(0, 0, 0), Vec3d(1, 0, 0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Frozen from the search oracle: closest point is (1, 0, 0), distance 2*sqrt(2).
  CHECK(std::abs(geo::pointing_error(Vec3d(1, 2, 2), Vec3d(0, 0, 0),
                                     Vec3d(2, 0, 0)) -
                 2.8284271247461903) < 1e-12);

  CHECK_THROWS_AS(
      geo::pointing_error(Vec3d(1, 2, 2), Vec3d(0, 0, 0), Vec3d(0, 0, 1e-13)),
      geo::ZeroDirectionError);
}

TEST_CASE("pointing_error equals brute-force line search") {
  Rng rng(14);
  for (int i = 0; i < 300; ++i) {
    const Vec3d g(rng.uniform(-5000, 5000), rng.uniform(-5000, 5000),
                  rng.uniform(-5000, 5000));
    const Vec3d p(rng.uniform(-5000, 5000), rng.uniform(-5000, 5000),
                  rng.uniform(-5000, 5000));
    Vec3d v(rng.gaussian(), rng.gaussian(), rng.gaussian());
    v *= rng.uniform(0.1, 10.0) / v.norm();
    const double expected = oracles::line_point_distance_search(g, p, v);
    CHECK(std::abs(geo::pointing_error(g, p, v) - expected) < 1e-6);
  }
}

TEST_CASE("pointing_error invariances") {
  Rng rng(15);
  for (int i = 0; i < 300; ++i) {
    const Vec3d g(rng.uniform(-3000, 3000), rng.uniform(-3000, 3000),
                  rng.uniform(-3000, 3000));
    const Vec3d p(rng.uniform(-3000, 3000), rng.uniform(-3000, 3000),
                  rng.uniform(-3000, 3000));
    const Vec3d v = Vec3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    if (v.norm() < 1e-6) continue;
    const double base = geo::pointing_error(g, p, v);

    // Positive rescaling of the direction.
    CHECK(std::abs(geo::pointing_error(g, p, v * rng.uniform(0.01, 100.0)) -
                   base) < 1e-6);

    // Common rigid transform of target, key point, and direction.
    const auto a = random_transform(rng);
    const double moved = geo::pointing_error(
        geo::transform_point(a, g), geo::transform_point(a, p),
        Vec3d(a.rotation * v));
    CHECK(std::abs(moved - base) < 1e-6);
  }
}

TEST_CASE("floor_distance examples and gates") {
  CHECK(geo::floor_distance(Vec3d(0, 0, 0), geo::UnitVec3d(0, 0, -1),
                            1000.0) == doctest::Approx(1000.0).epsilon(1e-12));

  // Frozen check: p_z + d * x_z == -h.
  const auto dir = geo::UnitVec3d::normalized(
      Vec3d(std::sqrt(1.0 - 0.16), 0.0, -0.4));
  const double d = geo::floor_distance(Vec3d(500, 0, 500), dir, 300.0);
  CHECK(d == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(std::abs(500.0 + d * dir.z() - (-300.0)) < 1e-9);

  CHECK_THROWS_AS(
      geo::floor_distance(Vec3d(0, 0, 0),
                          geo::UnitVec3d::normalized(Vec3d(0.995, 0, 0.1)),
                          1000.0),
      geo::NoFloorIntersectionError);
  CHECK_THROWS_AS(geo::floor_distance(Vec3d(0, 0, -1000),
                                      geo::UnitVec3d(0, 0, -1), 1000.0),
                  geo::BelowFloorError);
}

TEST_CASE("resolve_target lands on the floor plane along the ray") {
  CHECK((geo::resolve_target(Vec3d(0, 0, 0), geo::UnitVec3d(0, 0, -1),
                             1000.0) -
         Vec3d(0, 0, -1000))
            .norm() < 1e-9);

  const auto dir = geo::UnitVec3d::normalized(
      Vec3d(std::sqrt(1.0 - 0.16), 0.0, -0.4));
  const Vec3d g = geo::resolve_target(Vec3d(500, 0, 500), dir, 300.0);
  CHECK(g.x() == doctest::Approx(2333.0302779823362).epsilon(1e-9));
  CHECK(g.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(g.z() + 300.0) < 1e-9);

  const auto diag =
      geo::UnitVec3d::normalized(Vec3d(0.0, 1.0, -1.0));
  const Vec3d g2 = geo::resolve_target(Vec3d(0, 200, 400), diag, 600.0);
  CHECK((g2 - Vec3d(0, 1200, -600)).norm() < 1e-9);
}

TEST_CASE("resolve_target invariants on random inputs") {
  Rng rng(16);
  for (int i = 0; i < 2000; ++i) {
    const double h = rng.uniform(200, 1500);
    Vec3d p(rng.uniform(-2000, 2000), rng.uniform(-2000, 2000),
            rng.uniform(-h + 1.0, 2000));
    const double pitch = deg2rad(rng.uniform(0.05, 89.95));
    const double yaw = deg2rad(rng.uniform(-180.0, 180.0));
    const auto dir = geo::direction_from_angles(pitch, yaw);
    const Vec3d g = geo::resolve_target(p, dir, h);
    CHECK(std::abs(g.z() + h) < 1e-9);
    CHECK((g - p).normalized().cross(dir.vec()).norm() < 1e-9);
  }
}

TEST_CASE("project_to_floor_line drops the vertical component") {
  const auto r = geo::project_to_floor_line(Vec3d(0, 0, 1500),
                                            geo::UnitVec3d(1, 0, 0), 0.0);
  CHECK((r.origin - Vec3d(0, 0, 0)).norm() < 1e-12);
  CHECK((r.direction.vec() - Vec3d(1, 0, 0)).norm() < 1e-12);

  const auto dir =
      geo::UnitVec3d::normalized(Vec3d(0.6, 0.8, -0.5));
  const auto r2 = geo::project_to_floor_line(Vec3d(100, 50, 1400), dir, 450.0);
  CHECK((r2.origin - Vec3d(100, 50, -450)).norm() < 1e-12);
  CHECK((r2.direction.vec() - Vec3d(0.6, 0.8, 0.0)).norm() < 1e-9);

  CHECK_THROWS_AS(geo::project_to_floor_line(Vec3d(0, 0, 1500),
                                             geo::UnitVec3d(0, 0, -1), 0.0),
                  geo::DegenerateProjectionError);
}

TEST_CASE("compose and invert round trip") {
  Rng rng(17);
  const auto id = geo::RigidTransformd::identity();

  const auto a = random_transform(rng);
  const auto ia = geo::compose(id, a);
  CHECK((ia.rotation - a.rotation).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ia.translation - a.translation).norm() < 1e-12);

  const auto shift = geo::RigidTransformd::from_translation(Vec3d(3, -4, 5));
  const auto unshift = geo::invert(shift);
  CHECK((unshift.translation - Vec3d(-3, 4, -5)).norm() < 1e-12);

  for (int i = 0; i < 300; ++i) {
    const auto x = random_transform(rng);
    const auto y = random_transform(rng);
    const Vec3d p(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000),
                  rng.uniform(-1000, 1000));

    const Vec3d via_compose = geo::transform_point(geo::compose(x, y), p);
    const Vec3d via_chain = geo::transform_point(x, geo::transform_point(y, p));
    CHECK((via_compose - via_chain).norm() < 1e-9);

    const Vec3d back =
        geo::transform_point(geo::invert(x), geo::transform_point(x, p));
    CHECK((back - p).norm() < 1e-9);
  }
}

TEST_CASE("UnitVec3 and RigidTransform enforce their invariants") {
  CHECK_THROWS_AS(geo::UnitVec3d(1.0, 0.0, 0.01), geo::GeometryError);
  CHECK_THROWS_AS(geo::UnitVec3d::normalized(Vec3d::Zero()),
                  geo::ZeroDirectionError);

  geo::RigidTransformd bad;
  bad.rotation(0, 0) = 1.5;
  CHECK_THROWS_AS(bad.validate(), geo::InvalidTransformError);

  geo::RigidTransformd mirror = geo::RigidTransformd::identity();
  mirror.rotation(2, 2) = -1.0;
  CHECK_THROWS_AS(mirror.validate(), geo::InvalidTransformError);
}

TEST_CASE("PointingFeature validation") {
  geo::PointingFeature f;
  f.position_mm = Vec3d(1000, 0, 200);
  f.pitch_rad = deg2rad(20.0);
  f.yaw_rad = deg2rad(-45.0);
  CHECK_NOTHROW(f.validate());

  f.pitch_rad = deg2rad(90.0);
  CHECK_THROWS_AS(f.validate(), geo::PitchDomainError);

  f.pitch_rad = deg2rad(10.0);
  f.position_mm.x() = std::nan("");
  CHECK_THROWS_AS(f.validate(), geo::GeometryError);
}

TEST_CASE("geometry template instantiates for float") {
  const auto d = geo::direction_from_angles(deg2rad(30.0f), deg2rad(45.0f));
  CHECK(std::abs(d.vec().norm() - 1.0f) < 1e-6f);
  const auto [p, y] = geo::angles_from_direction(d);
  CHECK(std::abs(p - deg2rad(30.0f)) < 1e-5f);
  CHECK(std::abs(y - deg2rad(45.0f)) < 1e-5f);
}
