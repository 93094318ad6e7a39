#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "memsim/geometry.hpp"

namespace memsim {

/// MEMS mirror settings for one frame.
struct ScanConfig {
  int num_scanlines = 200;
  double fov_h = deg_to_rad(72.0);
  double fov_v = deg_to_rad(30.0);
  int points_per_line = 100;
  double frame_rate = 10.0;  // metadata only

  void validate() const;
  std::size_t num_samples() const {
    return static_cast<std::size_t>(num_scanlines) * static_cast<std::size_t>(points_per_line);
  }
  bool operator==(const ScanConfig&) const = default;
};

/// Beam deflection. Azimuth is positive to the left, elevation positive up.
struct ScanDirection {
  double azimuth = 0.0;
  double elevation = 0.0;
  std::uint32_t sample_index = 0;
};

/// Samples the mirror trajectory uniformly in frame time t in [0, 1]:
///   azimuth(t)   = fov_h/2 * sin(pi * num_scanlines * t)
///   elevation(t) = fov_v/2 * cos(pi * t)
/// i.e. num_scanlines horizontal half-periods over one top-to-bottom sweep.
std::vector<ScanDirection> generate_scan_directions(const ScanConfig& cfg);

/// Unit beam vector in the LiDAR frame. The direction is the ray through
/// (1, tan(azimuth), tan(elevation)), so atan2(y, x) and atan2(z, x) recover
/// the angles.
Vec3 beam_direction(const ScanDirection& d);

/// Inverse of beam_direction for any point with x > 0.
ScanDirection direction_of(const Vec3& p_lidar);

struct PixelIndex {
  int u = 0;
  int v = 0;
  bool operator==(const PixelIndex&) const = default;
};

/// Nearest pixel of each beam. +azimuth (left) maps to smaller u, +elevation
/// (up) to smaller v. Throws ValidationError if a beam lands more than one
/// pixel outside the image before clamping.
std::vector<PixelIndex> directions_to_pixels(std::span<const ScanDirection> dirs, const CameraIntrinsics& k);

}  // namespace memsim
