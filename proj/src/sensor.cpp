#include "memsim/sensor.hpp"

#include <cmath>
#include <limits>

#include "memsim/error.hpp"
#include "memsim/rng.hpp"

namespace memsim {

std::string to_string(FrameConvention c) {
  return c == FrameConvention::SensorRaw ? "sensor-raw" : "normalized";
}

FrameConvention frame_convention_from_string(const std::string& s) {
  if (s == "sensor-raw") return FrameConvention::SensorRaw;
  if (s == "normalized") return FrameConvention::Normalized;
  throw ValidationError("unknown frame convention '" + s + "'");
}

void PointCloudFrame::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!p.position().finite()) throw ValidationError("point " + std::to_string(i) + " has non-finite coordinates");
    if (!(p.intensity >= 0.0 && p.intensity <= 1.0))
      throw ValidationError("point " + std::to_string(i) + " intensity outside [0, 1]");
  }
  if (!provenance.empty() && provenance.size() != points.size())
    throw ValidationError("provenance length does not match point count");
  if (!sample_index.empty() && sample_index.size() != points.size())
    throw ValidationError("sample_index length does not match point count");
}

Vec3 level_point(const Vec3& p, double tilt) { return rotation_y(tilt) * p; }

bool label_contains(const Label& label, const Vec3& p, FrameConvention convention, double tilt) {
  if (convention == FrameConvention::Normalized) return point_in_box(label.box, p);
  Box3D level = label.box;
  level.center = level_point(label.box.center, tilt);
  return point_in_box(level, level_point(p, tilt));
}

int count_points_in_label(const Label& label, const PointCloudFrame& cloud, double tilt) {
  int n = 0;
  for (const auto& p : cloud.points) n += label_contains(label, p.position(), cloud.convention, tilt) ? 1 : 0;
  return n;
}

AnnotatedFrame simulate_frame_direct(const SceneScript& scene, double t, int min_points) {
  scene.validate();
  const SceneSnapshot snap = scene_at(scene, t);
  const RigidTransform to_world = mount_to_transform(scene.mount);
  const RigidTransform to_sensor = inverse(to_world);
  const auto dirs = generate_scan_directions(scene.scan);

  AnnotatedFrame out;
  auto& cloud = out.cloud;
  cloud.points.reserve(dirs.size());
  for (const auto& d : dirs) {
    const Vec3 world_dir = rotate(to_world, beam_direction(d));
    const auto hit = raycast(snap, to_world.translation, world_dir);
    if (!hit) continue;
    const Vec3 world_point = to_world.translation + world_dir * hit->distance;
    const Vec3 p = apply(to_sensor, world_point);
    cloud.points.push_back({p.x, p.y, p.z, hit->reflectivity});
    cloud.provenance.push_back(hit->object_id);
    cloud.sample_index.push_back(d.sample_index);
  }
  out.labels = annotate_frame(scene, t, cloud, min_points);
  return out;
}

CameraIntrinsics depth_camera_for(const ScanConfig& scan, int width, int height) {
  scan.validate();
  const CameraIntrinsics k = intrinsics_from_fov(scan.fov_h, width, height);
  const double half_span = k.fy * std::tan(0.5 * scan.fov_v);
  // Beams may land at most one pixel past the border (see directions_to_pixels).
  if (k.cy + half_span > height || k.cy - half_span < -1.0) {
    throw ValidationError("depth resolution " + std::to_string(width) + "x" + std::to_string(height) +
                          " does not cover the vertical field of view; increase the height to at least " +
                          std::to_string(static_cast<int>(std::ceil(2.0 * half_span))));
  }
  return k;
}

PointCloudFrame sample_depth_image(const DepthImage& img, const CameraIntrinsics& k, const ScanConfig& scan) {
  if (img.width != k.width || img.height != k.height)
    throw ValidationError("depth image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                          " but intrinsics expect " + std::to_string(k.width) + "x" + std::to_string(k.height));
  const auto dirs = generate_scan_directions(scan);
  const auto pixels = directions_to_pixels(dirs, k);
  const bool with_ids = !img.object_id.empty();

  PointCloudFrame cloud;
  cloud.points.reserve(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto [u, v] = pixels[i];
    const double depth = img.at(u, v);
    // +inf is "no return"; zero depth is treated the same way.
    if (!std::isfinite(depth) || depth <= 0.0) continue;
    const Vec3 p = camera_to_lidar(unproject(k, u, v, depth));
    cloud.points.push_back({p.x, p.y, p.z, 1.0});
    if (with_ids) cloud.provenance.push_back(img.object_at(u, v));
    cloud.sample_index.push_back(dirs[i].sample_index);
  }
  return cloud;
}

AnnotatedFrame simulate_frame_depthpath(const SceneScript& scene, double t, int width, int height, int min_points) {
  scene.validate();
  const CameraIntrinsics k = depth_camera_for(scene.scan, width, height);
  const SceneSnapshot snap = scene_at(scene, t);
  const DepthImage img = render_depth(snap, mount_to_transform(scene.mount), k).quantized();
  AnnotatedFrame out;
  out.cloud = sample_depth_image(img, k, scene.scan);
  out.labels = annotate_frame(scene, t, out.cloud, min_points);
  return out;
}

std::vector<Label> annotate_frame(const SceneScript& scene, double t, const PointCloudFrame& cloud, int min_points) {
  if (cloud.convention != FrameConvention::SensorRaw)
    throw ValidationError("annotate_frame expects a sensor-raw cloud");
  const SceneSnapshot snap = scene_at(scene, t);
  const RigidTransform to_sensor = inverse(mount_to_transform(scene.mount));
  std::vector<Label> labels;
  for (const auto& person : snap.persons) {
    Label label;
    label.object_id = person.object_id;
    label.box = person.world_box;
    label.box.center = apply(to_sensor, person.world_box.center);
    label.box.yaw = wrap_angle(person.world_box.yaw - scene.mount.heading);
    label.num_points = count_points_in_label(label, cloud, scene.mount.tilt);
    if (label.num_points >= min_points) labels.push_back(label);
  }
  return labels;
}

PointCloudFrame ingest_external_depth(const DepthImage& img, const RigidTransform& pose, const CameraIntrinsics& k,
                                      const ScanConfig& scan) {
  pose.validate();
  k.validate();
  for (std::size_t i = 0; i < img.depth.size(); ++i) {
    const double d = img.depth[i];
    if (std::isnan(d) || d < 0.0) throw DataError("depth frame contains a negative or NaN depth at index " + std::to_string(i));
  }
  DepthImage plain = img;
  plain.object_id.clear();
  return sample_depth_image(plain, k, scan);
}

PointCloudFrame add_range_noise(const PointCloudFrame& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("noise sigma must be non-negative");
  if (sigma == 0.0) return cloud;
  if (cloud.convention != FrameConvention::SensorRaw)
    throw ValidationError("range noise needs the sensor origin; apply it before normalization");
  Rng rng(seed);
  PointCloudFrame out = cloud;
  for (auto& p : out.points) {
    const double offset = sigma * rng.normal();
    const Vec3 pos = p.position();
    const double r = norm(pos);
    if (r == 0.0) continue;
    const Vec3 moved = pos * ((r + offset) / r);
    p.x = moved.x;
    p.y = moved.y;
    p.z = moved.z;
  }
  return out;
}

}  // namespace memsim
