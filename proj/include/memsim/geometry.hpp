#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace memsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  constexpr double operator()(int r, int c) const { return m[r * 3 + c]; }
  constexpr double& operator()(int r, int c) { return m[r * 3 + c]; }

  static constexpr Mat3 identity() { return {}; }
  Mat3 transposed() const;
  Mat3 operator*(const Mat3& o) const;
  Vec3 operator*(const Vec3& v) const;
  double determinant() const;
  constexpr bool operator==(const Mat3&) const = default;
};

Mat3 rotation_x(double angle);
Mat3 rotation_y(double angle);
Mat3 rotation_z(double angle);
/// Rodrigues rotation about `axis` (need not be unit length, must be nonzero).
Mat3 rotation_axis_angle(const Vec3& axis, double angle);

/// Wraps an angle into [-pi, pi).
double wrap_angle(double angle);

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Proper rigid motion p -> R p + t.
struct RigidTransform {
  Mat3 rotation = Mat3::identity();
  Vec3 translation{};

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t) { return {Mat3::identity(), t}; }

  /// Throws ValidationError unless the rotation is orthonormal with det +1 (tol 1e-9).
  void validate() const;
  bool operator==(const RigidTransform&) const = default;
};

Vec3 apply(const RigidTransform& t, const Vec3& p);
/// Applies only the rotational part.
Vec3 rotate(const RigidTransform& t, const Vec3& v);
RigidTransform inverse(const RigidTransform& t);
/// Returns a o b, i.e. apply(compose(a, b), p) == apply(a, apply(b, p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

/// Oriented cuboid with yaw about +z. Extents are full edge lengths.
struct Box3D {
  Vec3 center{};
  double dx = 1.0;
  double dy = 1.0;
  double dz = 1.0;
  double yaw = 0.0;

  /// Checks positive finite extents and finite center; wraps yaw into [-pi, pi).
  void validate() const;
  Box3D normalized_yaw() const;
  double volume() const { return dx * dy * dz; }
};

/// Corner order: bottom face (z - dz/2) counter-clockwise viewed from +z starting
/// at local (-dx/2, -dy/2), i.e. (-,-), (+,-), (+,+), (-,+); then the top face in
/// the same order.
std::array<Vec3, 8> box_corners(const Box3D& b);

/// Slack applied on every face so points on the boundary (and corners produced
/// by box_corners) are reported as inside despite rounding.
inline constexpr double kBoxContainmentTolerance = 1e-9;

/// Expresses p in the box frame (un-center, un-yaw).
Vec3 to_box_frame(const Box3D& b, const Vec3& p);
bool point_in_box(const Box3D& b, const Vec3& p);

/// Pinhole camera, square pixels. Pixel (u, v) has its ray at exactly (u, v):
/// integer pixel indices are the sample positions.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  int width = 1;
  int height = 1;

  void validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

CameraIntrinsics intrinsics_from_fov(double fov_h, int width, int height);
/// Camera-frame point for pixel (u, v) at z-depth `depth`.
Vec3 unproject(const CameraIntrinsics& k, double u, double v, double depth);
PixelDepth project(const CameraIntrinsics& k, const Vec3& p_cam);

/// Camera (x right, y down, z forward) to LiDAR (x forward, y left, z up).
constexpr Vec3 camera_to_lidar(const Vec3& c) { return {c.z, -c.x, -c.y}; }
constexpr Vec3 lidar_to_camera(const Vec3& l) { return {-l.y, -l.z, l.x}; }

}  // namespace memsim
