#include "memsim/geometry.hpp"

#include <algorithm>
#include <string>

#include "memsim/error.hpp"

namespace memsim {

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) + (*this)(i, 2) * o(2, j);
    }
  }
  return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

double Mat3::determinant() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 rotation_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{1, 0, 0, 0, c, -s, 0, s, c}};
}

Mat3 rotation_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{c, 0, s, 0, 1, 0, -s, 0, c}};
}

Mat3 rotation_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{c, -s, 0, s, c, 0, 0, 0, 1}};
}

Mat3 rotation_axis_angle(const Vec3& axis, double angle) {
  const double n = norm(axis);
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("rotation axis must be nonzero and finite");
  const Vec3 k = axis / n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {{t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y,
           t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x,
           t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c}};
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = angle - two_pi * std::floor((angle + std::numbers::pi) / two_pi);
  // floor() can land exactly on +pi after rounding.
  if (w >= std::numbers::pi) w -= two_pi;
  if (w < -std::numbers::pi) w = -std::numbers::pi;
  return w;
}

void RigidTransform::validate() const {
  if (!translation.finite()) throw ValidationError("transform translation must be finite");
  const Mat3 rtr = rotation.transposed() * rotation;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(rtr(i, j) - (i == j ? 1.0 : 0.0)));
  if (!(worst <= 1e-9)) throw ValidationError("transform rotation is not orthonormal");
  if (!(std::abs(rotation.determinant() - 1.0) <= 1e-9))
    throw ValidationError("transform rotation must have determinant +1");
}

Vec3 apply(const RigidTransform& t, const Vec3& p) { return t.rotation * p + t.translation; }

Vec3 rotate(const RigidTransform& t, const Vec3& v) { return t.rotation * v; }

RigidTransform inverse(const RigidTransform& t) {
  const Mat3 rt = t.rotation.transposed();
  return {rt, -(rt * t.translation)};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

void Box3D::validate() const {
  if (!center.finite()) throw ValidationError("box center must be finite");
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0) || !std::isfinite(dx) || !std::isfinite(dy) ||
      !std::isfinite(dz))
    throw ValidationError("box extents must be positive and finite");
  if (!std::isfinite(yaw)) throw ValidationError("box yaw must be finite");
}

Box3D Box3D::normalized_yaw() const {
  Box3D b = *this;
  b.yaw = wrap_angle(yaw);
  return b;
}

std::array<Vec3, 8> box_corners(const Box3D& b) {
  static constexpr std::array<std::array<double, 2>, 4> kFootprint{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  std::array<Vec3, 8> out;
  for (int level = 0; level < 2; ++level) {
    const double lz = (level == 0 ? -0.5 : 0.5) * b.dz;
    for (int i = 0; i < 4; ++i) {
      const double lx = kFootprint[i][0] * 0.5 * b.dx;
      const double ly = kFootprint[i][1] * 0.5 * b.dy;
      out[level * 4 + i] = {b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly, b.center.z + lz};
    }
  }
  return out;
}

Vec3 to_box_frame(const Box3D& b, const Vec3& p) {
  const Vec3 d = p - b.center;
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
}

bool point_in_box(const Box3D& b, const Vec3& p) {
  const Vec3 l = to_box_frame(b, p);
  constexpr double tol = kBoxContainmentTolerance;
  return std::abs(l.x) <= 0.5 * b.dx + tol && std::abs(l.y) <= 0.5 * b.dy + tol &&
         std::abs(l.z) <= 0.5 * b.dz + tol;
}

void CameraIntrinsics::validate() const {
  if (width < 1 || height < 1) throw ValidationError("image size must be at least 1x1");
  if (!(fx > 0.0 && fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy))
    throw ValidationError("focal lengths must be positive");
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height))
    throw ValidationError("principal point must lie inside the image");
}

CameraIntrinsics intrinsics_from_fov(double fov_h, int width, int height) {
  if (!(fov_h > 0.0 && fov_h < std::numbers::pi))
    throw ValidationError("horizontal field of view must lie in (0, pi), got " + std::to_string(fov_h));
  if (width < 1 || height < 1) throw ValidationError("image size must be at least 1x1");
  // Extended precision keeps fx correctly rounded (fov pi/2 on a 2 px image gives exactly 1).
  const double f = static_cast<double>(width / (2.0L * std::tan(0.5L * fov_h)));
  return {f, f, 0.5 * width, 0.5 * height, width, height};
}

Vec3 unproject(const CameraIntrinsics& k, double u, double v, double depth) {
  if (!(depth > 0.0)) throw ValidationError("unproject requires positive depth");
  return {(u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth};
}

PixelDepth project(const CameraIntrinsics& k, const Vec3& p) {
  if (!(p.z > 0.0)) throw ValidationError("cannot project a point at or behind the camera");
  return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy, p.z};
}

}  // namespace memsim
