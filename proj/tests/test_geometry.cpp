#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "memsim/error.hpp"
#include "memsim/geometry.hpp"
#include "memsim/rng.hpp"

using namespace memsim;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

bool near(const Vec3& a, const Vec3& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

RigidTransform random_transform(Rng& rng) {
  const Vec3 axis{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1) + 2.0};
  return {rotation_axis_angle(axis, rng.uniform(-kPi, kPi)),
          {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)}};
}

bool same_transform(const RigidTransform& a, const RigidTransform& b, double tol) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(a.rotation(i, j) - b.rotation(i, j)) > tol) return false;
  return near(a.translation, b.translation, tol);
}

bool same_corner_set(std::array<Vec3, 8> a, std::vector<Vec3> b, double tol) {
  for (const auto& c : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const Vec3& x) { return near(x, c, tol); });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return b.empty();
}

std::vector<Vec3> sign_combinations(double hx, double hy, double hz) {
  std::vector<Vec3> out;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0})
      for (double sz : {-1.0, 1.0}) out.push_back({sx * hx, sy * hy, sz * hz});
  return out;
}

}  // namespace

TEST_CASE("apply") {
  CHECK(apply(RigidTransform{}, {1, 2, 3}) == Vec3{1, 2, 3});
  CHECK(apply(RigidTransform{Mat3::identity(), {0, 0, 4}}, {0, 0, 0}) == Vec3{0, 0, 4});
  CHECK(near(apply(RigidTransform{rotation_z(kPi / 2), {}}, {1, 0, 0}), {0, 1, 0}, 1e-15));
}

TEST_CASE("inverse") {
  CHECK(same_transform(inverse(RigidTransform{}), RigidTransform{}, 0.0));
  CHECK(inverse(RigidTransform{Mat3::identity(), {1, 2, 3}}).translation == Vec3{-1, -2, -3});

  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_transform(rng);
    const Vec3 p{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    CHECK(near(apply(inverse(t), apply(t, p)), p, 1e-9));
  }
}

TEST_CASE("compose") {
  Rng rng(12);
  const auto t = random_transform(rng);
  CHECK(same_transform(compose(RigidTransform{}, t), t, 1e-15));
  const RigidTransform a{Mat3::identity(), {1, 0, 0}}, b{Mat3::identity(), {0, 1, 0}};
  CHECK(compose(a, b).translation == Vec3{1, 1, 0});

  for (int i = 0; i < 200; ++i) {
    const auto x = random_transform(rng), y = random_transform(rng), z = random_transform(rng);
    CHECK(same_transform(compose(compose(x, y), z), compose(x, compose(y, z)), 1e-9));
  }
}

TEST_CASE("compose applies the right operand first") {
  const RigidTransform rot{rotation_z(kPi / 2), {}}, shift{Mat3::identity(), {1, 0, 0}};
  CHECK(near(apply(compose(rot, shift), {0, 0, 0}), {0, 1, 0}, 1e-15));
}

TEST_CASE("transform validation") {
  RigidTransform t;
  t.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  RigidTransform reflect;
  reflect.rotation(2, 2) = -1.0;
  CHECK_THROWS_AS(reflect.validate(), ValidationError);
  RigidTransform nan_shift{Mat3::identity(), {std::nan(""), 0, 0}};
  CHECK_THROWS_AS(nan_shift.validate(), ValidationError);
}

TEST_CASE("box corners") {
  CHECK(same_corner_set(box_corners({{0, 0, 0}, 1, 1, 1, 0}), sign_combinations(0.5, 0.5, 0.5), 1e-15));
  CHECK(same_corner_set(box_corners({{0, 0, 0}, 1, 1, 1, kPi / 2}), sign_combinations(0.5, 0.5, 0.5), 1e-15));
  CHECK(same_corner_set(box_corners({{0, 0, 0}, 2, 1, 1, kPi / 2}), sign_combinations(0.5, 1.0, 0.5), 1e-15));

  const auto c = box_corners({{1, 2, 3}, 2, 4, 6, 0});
  CHECK(c[0] == Vec3{0, 0, 0});
  CHECK(c[6] == Vec3{2, 4, 6});
}

TEST_CASE("point in box") {
  const Box3D cube{{0, 0, 0}, 1, 1, 1, 0};
  CHECK(point_in_box(cube, {0, 0, 0}));
  CHECK_FALSE(point_in_box(cube, {0.6, 0, 0}));
  CHECK(point_in_box(cube, {0.5, 0.5, -0.5}));

  const Box3D slim{{0, 0, 0}, 2, 0.2, 1, kPi / 4};
  const double c45 = std::cos(kPi / 4), s45 = std::sin(kPi / 4);
  CHECK(point_in_box(slim, {0.9 * c45, 0.9 * s45, 0}));
  // Same distance along the other diagonal is 0.9 off the thin axis.
  CHECK_FALSE(point_in_box(slim, {0.9 * c45, -0.9 * s45, 0}));
}

TEST_CASE("box validation and yaw wrapping") {
  CHECK_THROWS_AS(Box3D({{0, 0, 0}, 0, 1, 1, 0}).validate(), ValidationError);
  CHECK_THROWS_AS(Box3D({{0, 0, 0}, 1, -1, 1, 0}).validate(), ValidationError);
  CHECK(Box3D({{0, 0, 0}, 1, 1, 1, 3 * kPi / 2}).normalized_yaw().yaw == Approx(-kPi / 2));
  CHECK(wrap_angle(kPi) == Approx(-kPi));
  CHECK(wrap_angle(-kPi) == Approx(-kPi));
  CHECK(wrap_angle(0.25) == 0.25);
}

TEST_CASE("intrinsics from field of view") {
  CHECK(intrinsics_from_fov(kPi / 2, 2, 2).fx == Approx(1.0).epsilon(1e-15));
  const auto k = intrinsics_from_fov(kPi / 2, 1000, 750);
  CHECK(k.fx == Approx(500.0));
  CHECK(k.fy == Approx(500.0));
  CHECK(k.cx == 500.0);
  CHECK(k.cy == 375.0);
  // 512 / tan(36 deg) = 704.7075...
  CHECK(intrinsics_from_fov(deg_to_rad(72), 1024, 768).fx == Approx(704.7075432812).epsilon(1e-10));

  CHECK_THROWS_AS(intrinsics_from_fov(0.0, 10, 10), ValidationError);
  CHECK_THROWS_AS(intrinsics_from_fov(kPi, 10, 10), ValidationError);
  CHECK_THROWS_AS(intrinsics_from_fov(1.0, 0, 10), ValidationError);
}

TEST_CASE("unproject and project") {
  const auto k = intrinsics_from_fov(kPi / 2, 1000, 750);
  CHECK(unproject(k, k.cx, k.cy, 7.0) == Vec3{0, 0, 7});
  const CameraIntrinsics unit{1, 1, 1, 1, 4, 4};
  CHECK(unproject(unit, 2, 1, 3) == Vec3{3, 0, 3});
  CHECK_THROWS_AS(unproject(k, 1, 1, 0.0), ValidationError);

  const auto pc = project(k, {0, 0, 5});
  CHECK(pc.u == k.cx);
  CHECK(pc.v == k.cy);
  CHECK(pc.depth == 5.0);
  const CameraIntrinsics k500{500, 500, 500, 375, 1000, 750};
  CHECK(project(k500, {1, 0, 5}).u == Approx(600.0));
  CHECK(project(k500, {1, 0, 5}).v == 375.0);
  CHECK_THROWS_AS(project(k, {0, 0, -1}), ValidationError);

  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0.1, 60)};
    const auto px = project(k, p);
    CHECK(near(unproject(k, px.u, px.v, px.depth), p, 1e-9));
    const double u = rng.uniform(0, 1000), v = rng.uniform(0, 750), d = rng.uniform(0.1, 60);
    const auto back = project(k, unproject(k, u, v, d));
    CHECK(back.u == Approx(u).epsilon(1e-12));
    CHECK(back.v == Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("camera and lidar axes") {
  static_assert(camera_to_lidar({0, 0, 1}) == Vec3{1, 0, 0});
  static_assert(camera_to_lidar({1, 0, 0}) == Vec3{0, -1, 0});
  static_assert(camera_to_lidar({0, 1, 0}) == Vec3{0, 0, -1});
  CHECK(lidar_to_camera(camera_to_lidar({1, 2, 3})) == Vec3{1, 2, 3});
}

TEST_CASE("rotations are proper") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = rotation_axis_angle({rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0}, rng.uniform(-3, 3));
    CHECK(r.determinant() == Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(RigidTransform{r, {}}.validate());
  }
  CHECK(near(rotation_y(kPi / 2) * Vec3{1, 0, 0}, {0, 0, -1}, 1e-15));
  CHECK_THROWS_AS(rotation_axis_angle({0, 0, 0}, 1.0), ValidationError);
}
