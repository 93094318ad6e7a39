#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "memsim/geometry.hpp"
#include "memsim/scanpattern.hpp"

namespace memsim {

/// Horizontal plane z = z0, infinite extent.
struct GroundPlane {
  double z = 0.0;
};

/// Vertical cylinder standing on `base` (center of the bottom disk).
struct Cylinder {
  Vec3 base{};
  double radius = 0.5;
  double height = 1.0;
};

struct Sphere {
  Vec3 center{};
  double radius = 0.5;
};

using Shape = std::variant<GroundPlane, Box3D, Cylinder, Sphere>;

struct Primitive {
  Shape shape;
  int object_id = 0;
  double reflectivity = 1.0;

  void validate() const;
};

/// Cylinder body (feet to 0.85 * height) plus a sphere head of radius
/// 0.5 * body_radius whose top touches `height`.
struct PersonModel {
  double height = 1.75;
  double body_radius = 0.25;
  int object_id = 0;
  double reflectivity = 0.5;

  void validate() const;
  std::array<Primitive, 2> primitives_at(const Vec3& position) const;
};

struct Trajectory {
  std::vector<std::array<double, 2>> waypoints;
  double speed = 1.4;
  double start_time = 0.0;

  void validate() const;
};

struct PersonPose {
  Vec3 position{};
  double heading = 0.0;
};

/// Arc-length parametrized walk along the polyline; clamps at the last waypoint.
PersonPose person_pose_at(const Trajectory& tr, double t);

/// Upright box enclosing the person: 2r x 2r x height, yaw = heading.
Box3D person_world_box(const PersonModel& pm, const Vec3& position, double heading);

struct SensorMount {
  Vec3 position{0.0, 0.0, 4.0};
  double tilt = deg_to_rad(16.0);  // downward pitch
  double heading = 0.0;            // yaw of the level forward axis

  double height() const { return position.z; }
  void validate() const;

  /// Outdoor recording rig: 4 m high, 16 degrees down.
  static SensorMount campus() { return {{0.0, 0.0, 4.0}, deg_to_rad(16.0), 0.0}; }
  /// Industrial entrance rig: 5 m high, 23 degrees down.
  static SensorMount smartfactory_entrance() { return {{0.0, 0.0, 5.0}, deg_to_rad(23.0), 0.0}; }
  /// Resolves "campus" or "smartfactory-entrance"; nullopt otherwise.
  static std::optional<SensorMount> preset(const std::string& name);
};

/// Sensor-to-world transform of the LiDAR frame: Rz(heading) * Ry(tilt), so
/// the sensor x axis points forward and `tilt` below the horizon.
RigidTransform mount_to_transform(const SensorMount& m);

struct ScenePerson {
  PersonModel model;
  Trajectory trajectory;
};

inline constexpr double kDefaultMaxRange = 75.0;

struct SceneScript {
  std::vector<Primitive> statics;
  std::vector<ScenePerson> persons;
  SensorMount mount;
  ScanConfig scan;
  double max_range = kDefaultMaxRange;
  std::vector<double> frame_times;
  std::uint64_t seed = 20250101;  // used when a script omits "seed"

  void validate() const;
};

/// A person placed in a snapshot.
struct PlacedPerson {
  int object_id = 0;
  Box3D world_box;
};

/// Immutable state of the scene at one instant. Persons whose trajectory has
/// not started yet are absent.
struct SceneSnapshot {
  std::vector<Primitive> primitives;
  std::vector<PlacedPerson> persons;
  double max_range = kDefaultMaxRange;
  double time = 0.0;
};

SceneSnapshot scene_at(const SceneScript& scene, double t);

struct RayHit {
  double distance = 0.0;
  int object_id = 0;
  double reflectivity = 1.0;
};

/// Intersection distance of one primitive, nullopt on miss. `dir` must be unit.
std::optional<double> intersect(const Shape& shape, const Vec3& origin, const Vec3& dir);

/// Nearest hit within the snapshot's max range. Throws on a non-unit direction.
std::optional<RayHit> raycast(const SceneSnapshot& scene, const Vec3& origin, const Vec3& dir);

inline constexpr int kNoObject = -1;

/// Row-major z-depth image (+inf for no return) with the object id per pixel.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<int> object_id;

  DepthImage() = default;
  DepthImage(int w, int h);

  double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  int object_at(int u, int v) const {
    return object_id.empty() ? kNoObject : object_id[static_cast<std::size_t>(v) * width + u];
  }
  /// Same image with every depth rounded to float32, the storage precision of
  /// depth frames.
  DepthImage quantized() const;
};

/// Unit world-frame ray through pixel (u, v) for a camera rigidly attached
/// to the LiDAR frame `sensor_pose` (sensor-to-world).
Vec3 pixel_ray_world(const RigidTransform& sensor_pose, const CameraIntrinsics& k, int u, int v);

DepthImage render_depth(const SceneSnapshot& scene, const RigidTransform& sensor_pose, const CameraIntrinsics& k);

}  // namespace memsim
