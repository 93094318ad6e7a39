#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memsim/geometry.hpp"
#include "memsim/scanpattern.hpp"
#include "memsim/scene.hpp"

namespace memsim {

enum class FrameConvention {
  /// Sensor frame: origin at the sensor head, x along the (tilted) beam axis.
  SensorRaw,
  /// Levelled frame: origin on the ground below the sensor, z up.
  Normalized,
};

std::string to_string(FrameConvention c);
FrameConvention frame_convention_from_string(const std::string& s);

struct CloudPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Vec3 position() const { return {x, y, z}; }
  bool operator==(const CloudPoint&) const = default;
};

struct PointCloudFrame {
  std::vector<CloudPoint> points;
  std::int64_t frame_id = 0;
  FrameConvention convention = FrameConvention::SensorRaw;
  /// Object id per point (synthetic frames only); empty when unknown.
  std::vector<int> provenance;
  /// Scan sample that produced each point; empty when unknown.
  std::vector<std::uint32_t> sample_index;

  void validate() const;
  bool has_provenance() const { return !points.empty() && provenance.size() == points.size(); }
};

/// Annotated box. In a SensorRaw frame the center is in sensor coordinates
/// while the box stays upright: yaw and extents refer to the levelled frame
/// obtained by undoing the mount tilt (see level_point).
struct Label {
  Box3D box;
  std::string cls = "person";
  int object_id = 0;
  int num_points = 0;
};

/// Rotation that removes the mount tilt from sensor-frame coordinates.
Vec3 level_point(const Vec3& p, double tilt);

/// Point containment for a label of a frame with the given convention. `tilt`
/// is only used for SensorRaw frames.
bool label_contains(const Label& label, const Vec3& p, FrameConvention convention, double tilt);

int count_points_in_label(const Label& label, const PointCloudFrame& cloud, double tilt);

inline constexpr int kDefaultMinPoints = 5;

struct AnnotatedFrame {
  PointCloudFrame cloud;
  std::vector<Label> labels;
};

/// One exact raycast per scan direction.
AnnotatedFrame simulate_frame_direct(const SceneScript& scene, double t, int min_points = kDefaultMinPoints);

inline constexpr int kDefaultDepthWidth = 1024;
inline constexpr int kDefaultDepthHeight = 768;

/// Throws unless a width x height image with intrinsics_from_fov(scan.fov_h)
/// covers the whole scan pattern.
CameraIntrinsics depth_camera_for(const ScanConfig& scan, int width, int height);

/// Renders the depth image once, then samples it along the scan pattern and
/// lifts each sample with the inverse intrinsics. Depth is stored at float32
/// precision, as in depth files.
AnnotatedFrame simulate_frame_depthpath(const SceneScript& scene, double t, int width = kDefaultDepthWidth,
                                        int height = kDefaultDepthHeight, int min_points = kDefaultMinPoints);

/// Scan-pattern sampling of a depth image. Points get intensity 1 (a depth
/// image has no reflectance); provenance is filled when the image carries
/// object ids.
PointCloudFrame sample_depth_image(const DepthImage& img, const CameraIntrinsics& k, const ScanConfig& scan);

/// Person labels for a SensorRaw cloud; persons with fewer than min_points
/// points inside their box are treated as occluded and skipped.
std::vector<Label> annotate_frame(const SceneScript& scene, double t, const PointCloudFrame& cloud,
                                  int min_points = kDefaultMinPoints);

/// Samples an externally rendered depth frame. `pose` is the sensor-to-world
/// transform of the capture; it is validated but the cloud stays in the
/// sensor frame. No labels.
PointCloudFrame ingest_external_depth(const DepthImage& img, const RigidTransform& pose, const CameraIntrinsics& k,
                                      const ScanConfig& scan);

/// Displaces every point along its ray from the sensor origin by N(0, sigma).
PointCloudFrame add_range_noise(const PointCloudFrame& cloud, double sigma, std::uint64_t seed);

}  // namespace memsim
