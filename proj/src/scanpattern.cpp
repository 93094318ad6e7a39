#include "memsim/scanpattern.hpp"

#include <algorithm>
#include <string>

#include "memsim/error.hpp"

namespace memsim {

void ScanConfig::validate() const {
  if (num_scanlines < 2 || num_scanlines % 2 != 0)
    throw ValidationError("num_scanlines must be even and >= 2, got " + std::to_string(num_scanlines));
  if (points_per_line < 2) throw ValidationError("points_per_line must be >= 2");
  if (!(fov_h > 0.0 && fov_h < std::numbers::pi)) throw ValidationError("fov_h must lie in (0, 180) degrees");
  if (!(fov_v > 0.0 && fov_v < std::numbers::pi)) throw ValidationError("fov_v must lie in (0, 180) degrees");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) throw ValidationError("frame_rate must be positive");
}

std::vector<ScanDirection> generate_scan_directions(const ScanConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.num_samples();
  const double half_h = 0.5 * cfg.fov_h;
  const double half_v = 0.5 * cfg.fov_v;
  const double last = static_cast<double>(n - 1);
  std::vector<ScanDirection> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / last;
    out[i] = {half_h * std::sin(std::numbers::pi * cfg.num_scanlines * t),
              half_v * std::cos(std::numbers::pi * t), static_cast<std::uint32_t>(i)};
  }
  return out;
}

Vec3 beam_direction(const ScanDirection& d) {
  return normalized(Vec3{1.0, std::tan(d.azimuth), std::tan(d.elevation)});
}

ScanDirection direction_of(const Vec3& p) { return {std::atan2(p.y, p.x), std::atan2(p.z, p.x), 0}; }

std::vector<PixelIndex> directions_to_pixels(std::span<const ScanDirection> dirs, const CameraIntrinsics& k) {
  k.validate();
  std::vector<PixelIndex> out;
  out.reserve(dirs.size());
  const double max_u = k.width - 1;
  const double max_v = k.height - 1;
  for (const auto& d : dirs) {
    // Camera frame at unit depth: x_cam = -y_lidar, y_cam = -z_lidar.
    const double u = k.fx * -std::tan(d.azimuth) + k.cx;
    const double v = k.fy * -std::tan(d.elevation) + k.cy;
    if (u < -1.0 || u > max_u + 1.0 || v < -1.0 || v > max_v + 1.0) {
      throw ValidationError("scan direction " + std::to_string(d.sample_index) +
                            " projects outside the depth image; field of view and intrinsics disagree");
    }
    out.push_back({static_cast<int>(std::clamp(std::round(u), 0.0, max_u)),
                   static_cast<int>(std::clamp(std::round(v), 0.0, max_v))});
  }
  return out;
}

}  // namespace memsim
