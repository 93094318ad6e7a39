#include "memsim/scene.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "memsim/error.hpp"

namespace memsim {

namespace {

constexpr double kHitEpsilon = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::optional<double> nearest_positive(double t0, double t1) {
  if (t0 > t1) std::swap(t0, t1);
  if (t0 > kHitEpsilon) return t0;
  if (t1 > kHitEpsilon) return t1;
  return std::nullopt;
}

std::optional<double> hit_plane(const GroundPlane& p, const Vec3& o, const Vec3& d) {
  if (d.z == 0.0) return std::nullopt;
  const double t = (p.z - o.z) / d.z;
  return t > kHitEpsilon ? std::optional<double>(t) : std::nullopt;
}

std::optional<double> hit_box(const Box3D& b, const Vec3& o, const Vec3& d) {
  const Vec3 lo = to_box_frame(b, o);
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const Vec3 ld{c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
  const double half[3] = {0.5 * b.dx, 0.5 * b.dy, 0.5 * b.dz};
  const double org[3] = {lo.x, lo.y, lo.z};
  const double dir[3] = {ld.x, ld.y, ld.z};
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (org[a] < -half[a] || org[a] > half[a]) return std::nullopt;
      continue;
    }
    double t0 = (-half[a] - org[a]) / dir[a];
    double t1 = (half[a] - org[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  return nearest_positive(t_near, t_far);
}

std::optional<double> hit_sphere(const Sphere& sp, const Vec3& o, const Vec3& d) {
  const Vec3 oc = o - sp.center;
  const double b = dot(oc, d);
  const double c = dot(oc, oc) - sp.radius * sp.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots of t^2 + 2bt + c = 0.
  const double q = b > 0.0 ? -b - root : -b + root;
  if (q == 0.0) return nearest_positive(0.0, 0.0);
  return nearest_positive(q, c / q);
}

std::optional<double> hit_cylinder(const Cylinder& cy, const Vec3& o, const Vec3& d) {
  std::optional<double> best;
  auto consider = [&](double t) {
    if (t > kHitEpsilon && (!best || t < *best)) best = t;
  };
  const double z_lo = cy.base.z;
  const double z_hi = cy.base.z + cy.height;
  const double r2 = cy.radius * cy.radius;

  const double ox = o.x - cy.base.x, oy = o.y - cy.base.y;
  const double a = d.x * d.x + d.y * d.y;
  if (a > 0.0) {
    const double b = ox * d.x + oy * d.y;
    const double c = ox * ox + oy * oy - r2;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double q = b > 0.0 ? -b - root : -b + root;
      double roots[2] = {q / a, q != 0.0 ? c / q : q / a};
      for (double t : roots) {
        const double z = o.z + t * d.z;
        if (z >= z_lo && z <= z_hi) consider(t);
      }
    }
  }
  if (d.z != 0.0) {
    for (double zc : {z_lo, z_hi}) {
      const double t = (zc - o.z) / d.z;
      const double px = ox + t * d.x, py = oy + t * d.y;
      if (px * px + py * py <= r2) consider(t);
    }
  }
  return best;
}

}  // namespace

void Primitive::validate() const {
  if (!(reflectivity > 0.0 && reflectivity <= 1.0))
    throw ValidationError("reflectivity of object " + std::to_string(object_id) + " must lie in (0, 1]");
  std::visit(Overloaded{
                 [](const GroundPlane& p) {
                   if (!std::isfinite(p.z)) throw ValidationError("ground plane height must be finite");
                 },
                 [](const Box3D& b) { b.validate(); },
                 [](const Cylinder& c) {
                   if (!c.base.finite() || !(c.radius > 0.0) || !(c.height > 0.0))
                     throw ValidationError("cylinder needs finite base and positive radius/height");
                 },
                 [](const Sphere& s) {
                   if (!s.center.finite() || !(s.radius > 0.0))
                     throw ValidationError("sphere needs finite center and positive radius");
                 },
             },
             shape);
}

void PersonModel::validate() const {
  if (!(height >= 1.2 && height <= 2.2))
    throw ValidationError("person " + std::to_string(object_id) + " height must lie in [1.2, 2.2] m");
  if (!(body_radius >= 0.1 && body_radius <= 0.5))
    throw ValidationError("person " + std::to_string(object_id) + " body_radius must lie in [0.1, 0.5] m");
  if (!(reflectivity > 0.0 && reflectivity <= 1.0))
    throw ValidationError("person " + std::to_string(object_id) + " reflectivity must lie in (0, 1]");
}

std::array<Primitive, 2> PersonModel::primitives_at(const Vec3& position) const {
  const double head_r = 0.5 * body_radius;
  return {Primitive{Cylinder{position, body_radius, 0.85 * height}, object_id, reflectivity},
          Primitive{Sphere{position + Vec3{0.0, 0.0, height - head_r}, head_r}, object_id, reflectivity}};
}

void Trajectory::validate() const {
  if (waypoints.size() < 2) throw ValidationError("trajectory needs at least two waypoints");
  if (!(speed > 0.0) || !std::isfinite(speed)) throw ValidationError("trajectory speed must be positive");
  if (!std::isfinite(start_time)) throw ValidationError("trajectory start_time must be finite");
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const auto& a = waypoints[i];
    const auto& b = waypoints[i + 1];
    if (!std::isfinite(a[0]) || !std::isfinite(a[1]) || !std::isfinite(b[0]) || !std::isfinite(b[1]))
      throw ValidationError("trajectory waypoints must be finite");
    if (a == b) throw ValidationError("consecutive trajectory waypoints coincide at index " + std::to_string(i));
  }
}

PersonPose person_pose_at(const Trajectory& tr, double t) {
  tr.validate();
  if (t < tr.start_time) throw ValidationError("pose requested before the trajectory start time");
  double remaining = tr.speed * (t - tr.start_time);
  const auto& w = tr.waypoints;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double ex = w[i + 1][0] - w[i][0];
    const double ey = w[i + 1][1] - w[i][1];
    const double len = std::hypot(ex, ey);
    const double heading = wrap_angle(std::atan2(ey, ex));
    if (remaining < len) {
      const double f = remaining / len;
      return {{w[i][0] + f * ex, w[i][1] + f * ey, 0.0}, heading};
    }
    remaining -= len;
  }
  const auto& a = w[w.size() - 2];
  const auto& b = w.back();
  return {{b[0], b[1], 0.0}, wrap_angle(std::atan2(b[1] - a[1], b[0] - a[0]))};
}

Box3D person_world_box(const PersonModel& pm, const Vec3& position, double heading) {
  return {{position.x, position.y, position.z + 0.5 * pm.height},
          2.0 * pm.body_radius,
          2.0 * pm.body_radius,
          pm.height,
          wrap_angle(heading)};
}

void SensorMount::validate() const {
  if (!position.finite()) throw ValidationError("mount position must be finite");
  if (!(position.z > 0.0)) throw ValidationError("mount height must be positive");
  if (!(tilt >= 0.0 && tilt < 0.5 * std::numbers::pi)) throw ValidationError("mount tilt must lie in [0, 90) degrees");
  if (!std::isfinite(heading)) throw ValidationError("mount heading must be finite");
}

std::optional<SensorMount> SensorMount::preset(const std::string& name) {
  if (name == "campus") return campus();
  if (name == "smartfactory-entrance") return smartfactory_entrance();
  return std::nullopt;
}

RigidTransform mount_to_transform(const SensorMount& m) {
  return {rotation_z(m.heading) * rotation_y(m.tilt), m.position};
}

void SceneScript::validate() const {
  std::set<int> ids;
  auto claim = [&](int id) {
    if (!ids.insert(id).second) throw ValidationError("duplicate object_id " + std::to_string(id));
  };
  for (const auto& p : statics) {
    p.validate();
    claim(p.object_id);
  }
  for (const auto& p : persons) {
    p.model.validate();
    p.trajectory.validate();
    claim(p.model.object_id);
  }
  mount.validate();
  scan.validate();
  if (!(max_range > 0.0)) throw ValidationError("max_range must be positive");
  for (std::size_t i = 0; i < frame_times.size(); ++i) {
    if (!std::isfinite(frame_times[i])) throw ValidationError("frame times must be finite");
    if (i > 0 && !(frame_times[i] > frame_times[i - 1]))
      throw ValidationError("frame times must be strictly increasing (index " + std::to_string(i) + ")");
  }
}

SceneSnapshot scene_at(const SceneScript& scene, double t) {
  SceneSnapshot snap;
  snap.max_range = scene.max_range;
  snap.time = t;
  snap.primitives = scene.statics;
  for (const auto& person : scene.persons) {
    if (t < person.trajectory.start_time) continue;
    const PersonPose pose = person_pose_at(person.trajectory, t);
    for (auto& prim : person.model.primitives_at(pose.position)) snap.primitives.push_back(prim);
    snap.persons.push_back({person.model.object_id, person_world_box(person.model, pose.position, pose.heading)});
  }
  return snap;
}

std::optional<double> intersect(const Shape& shape, const Vec3& origin, const Vec3& dir) {
  return std::visit(Overloaded{
                        [&](const GroundPlane& p) { return hit_plane(p, origin, dir); },
                        [&](const Box3D& b) { return hit_box(b, origin, dir); },
                        [&](const Cylinder& c) { return hit_cylinder(c, origin, dir); },
                        [&](const Sphere& s) { return hit_sphere(s, origin, dir); },
                    },
                    shape);
}

std::optional<RayHit> raycast(const SceneSnapshot& scene, const Vec3& origin, const Vec3& dir) {
  if (!(std::abs(norm(dir) - 1.0) <= 1e-9)) throw ValidationError("raycast direction must be unit length");
  std::optional<RayHit> best;
  for (const auto& prim : scene.primitives) {
    const auto t = intersect(prim.shape, origin, dir);
    if (t && (!best || *t < best->distance)) best = RayHit{*t, prim.object_id, prim.reflectivity};
  }
  if (best && best->distance > scene.max_range) return std::nullopt;
  return best;
}

DepthImage::DepthImage(int w, int h)
    : width(w),
      height(h),
      depth(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity()),
      object_id(static_cast<std::size_t>(w) * h, kNoObject) {}

DepthImage DepthImage::quantized() const {
  DepthImage q = *this;
  for (double& d : q.depth) d = static_cast<double>(static_cast<float>(d));
  return q;
}

Vec3 pixel_ray_world(const RigidTransform& sensor_pose, const CameraIntrinsics& k, int u, int v) {
  const Vec3 cam = unproject(k, u, v, 1.0);
  return normalized(rotate(sensor_pose, camera_to_lidar(cam)));
}

DepthImage render_depth(const SceneSnapshot& scene, const RigidTransform& sensor_pose, const CameraIntrinsics& k) {
  k.validate();
  DepthImage img(k.width, k.height);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 cam = unproject(k, u, v, 1.0);
      const double ray_len = norm(cam);
      const Vec3 dir = rotate(sensor_pose, camera_to_lidar(cam)) / ray_len;
      if (const auto hit = raycast(scene, sensor_pose.translation, dir)) {
        const std::size_t idx = static_cast<std::size_t>(v) * k.width + u;
        img.depth[idx] = hit->distance / ray_len;
        img.object_id[idx] = hit->object_id;
      }
    }
  }
  return img;
}

}  // namespace memsim
