#include <cmath>
#include <numbers>

#include "doctest.h"
#include "memsim/error.hpp"
#include "memsim/scanpattern.hpp"

using namespace memsim;
using doctest::Approx;

TEST_CASE("scan pattern endpoints") {
  const ScanConfig cfg;
  const auto dirs = generate_scan_directions(cfg);
  REQUIRE(dirs.size() == 20000);
  CHECK(dirs.front().azimuth == 0.0);
  CHECK(dirs.front().elevation == Approx(cfg.fov_v / 2).epsilon(1e-15));
  CHECK(std::abs(dirs.back().azimuth) <= 1e-9);
  CHECK(dirs.back().elevation == Approx(-cfg.fov_v / 2).epsilon(1e-15));
  for (std::size_t i = 0; i < dirs.size(); ++i) CHECK(dirs[i].sample_index == i);
}

TEST_CASE("scan pattern stays inside the field of view") {
  const ScanConfig cfg;
  const auto dirs = generate_scan_directions(cfg);
  const double h = deg_to_rad(36.0), v = deg_to_rad(15.0);
  double max_az = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    CHECK(std::abs(dirs[i].azimuth) <= h);
    CHECK(std::abs(dirs[i].elevation) <= v);
    if (i > 0) CHECK(dirs[i].elevation <= dirs[i - 1].elevation);
    max_az = std::max(max_az, std::abs(dirs[i].azimuth));
  }
  // The horizontal sweep actually reaches the edges.
  CHECK(max_az > 0.999 * h);
}

TEST_CASE("scan config validation") {
  ScanConfig odd;
  odd.num_scanlines = 7;
  CHECK_THROWS_AS(generate_scan_directions(odd), ValidationError);
  ScanConfig wide;
  wide.fov_h = std::numbers::pi;
  CHECK_THROWS_AS(wide.validate(), ValidationError);
  ScanConfig few;
  few.points_per_line = 1;
  CHECK_THROWS_AS(few.validate(), ValidationError);

  ScanConfig small;
  small.num_scanlines = 4;
  small.points_per_line = 10;
  CHECK(generate_scan_directions(small).size() == 40);
}

TEST_CASE("beam direction and inverse") {
  CHECK(beam_direction({0, 0, 0}) == Vec3{1, 0, 0});
  const ScanDirection d{0.3, -0.2, 0};
  const Vec3 b = beam_direction(d);
  CHECK(norm(b) == Approx(1.0).epsilon(1e-15));
  CHECK(std::atan2(b.y, b.x) == Approx(0.3).epsilon(1e-14));
  CHECK(std::atan2(b.z, b.x) == Approx(-0.2).epsilon(1e-14));
  const auto back = direction_of(7.5 * b);
  CHECK(back.azimuth == Approx(0.3).epsilon(1e-14));
  CHECK(back.elevation == Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("directions to pixels") {
  const ScanConfig cfg;
  const auto k = intrinsics_from_fov(cfg.fov_h, 1024, 768);

  const ScanDirection center{0, 0, 0};
  const auto c = directions_to_pixels(std::span(&center, 1), k);
  CHECK(c[0] == PixelIndex{512, 384});

  // Positive azimuth is to the left, i.e. toward u = 0.
  const ScanDirection left{cfg.fov_h / 2, 0, 0}, right{-cfg.fov_h / 2, 0, 0};
  CHECK(directions_to_pixels(std::span(&left, 1), k)[0].u == 0);
  CHECK(directions_to_pixels(std::span(&right, 1), k)[0].u == 1023);
  const ScanDirection up{0, deg_to_rad(10), 0};
  CHECK(directions_to_pixels(std::span(&up, 1), k)[0].v < 384);

  const ScanDirection outside{0, deg_to_rad(40), 0};
  CHECK_THROWS_AS(directions_to_pixels(std::span(&outside, 1), k), ValidationError);
}

TEST_CASE("pixel round trip recovers the scan angles") {
  const ScanConfig cfg;
  const auto k = intrinsics_from_fov(cfg.fov_h, 1024, 768);
  const auto dirs = generate_scan_directions(cfg);
  const auto px = directions_to_pixels(dirs, k);
  // Angular pitch of a pixel is largest on the optical axis: atan(1 / fx).
  const double pitch = std::atan(1.0 / k.fx);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec3 lidar = camera_to_lidar(unproject(k, px[i].u, px[i].v, 1.0));
    const auto back = direction_of(lidar);
    CHECK(std::abs(back.azimuth - dirs[i].azimuth) <= pitch);
    CHECK(std::abs(back.elevation - dirs[i].elevation) <= pitch);
  }
}
