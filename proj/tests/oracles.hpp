#pragma once

// Reference computations for the tests. Each one is written independently of
// the library code it checks (own containment test, own PR scan).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "memsim/geometry.hpp"
#include "memsim/rng.hpp"

namespace oracle {

struct OBox {
  double cx, cy, cz, dx, dy, dz, yaw;
};

inline OBox from(const memsim::Box3D& b) { return {b.center.x, b.center.y, b.center.z, b.dx, b.dy, b.dz, b.yaw}; }

inline bool inside(const OBox& b, double x, double y, double z) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double px = x - b.cx, py = y - b.cy;
  const double lx = c * px + s * py;
  const double ly = -s * px + c * py;
  return std::abs(lx) <= b.dx / 2 && std::abs(ly) <= b.dy / 2 && std::abs(z - b.cz) <= b.dz / 2;
}

/// Half-width of the axis-aligned footprint bound of a yawed rectangle.
inline void footprint_extent(const OBox& b, double& ex, double& ey) {
  const double c = std::abs(std::cos(b.yaw)), s = std::abs(std::sin(b.yaw));
  ex = 0.5 * (b.dx * c + b.dy * s);
  ey = 0.5 * (b.dx * s + b.dy * c);
}

/// Monte-Carlo IoU with uniform samples in the bounding box of both boxes.
inline double monte_carlo_iou(const memsim::Box3D& ba, const memsim::Box3D& bb, std::size_t samples,
                              std::uint64_t seed) {
  const OBox a = from(ba), b = from(bb);
  double ax, ay, bx, by;
  footprint_extent(a, ax, ay);
  footprint_extent(b, bx, by);
  const double x0 = std::min(a.cx - ax, b.cx - bx), x1 = std::max(a.cx + ax, b.cx + bx);
  const double y0 = std::min(a.cy - ay, b.cy - by), y1 = std::max(a.cy + ay, b.cy + by);
  const double z0 = std::min(a.cz - a.dz / 2, b.cz - b.dz / 2), z1 = std::max(a.cz + a.dz / 2, b.cz + b.dz / 2);
  memsim::Rng rng(seed);
  std::size_t both = 0, any = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = rng.uniform(x0, x1), y = rng.uniform(y0, y1), z = rng.uniform(z0, z1);
    const bool ia = inside(a, x, y, z), ib = inside(b, x, y, z);
    both += (ia && ib) ? 1 : 0;
    any += (ia || ib) ? 1 : 0;
  }
  return any == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(any);
}

inline double overlap_1d(double c1, double w1, double c2, double w2) {
  return std::max(0.0, std::min(c1 + w1 / 2, c2 + w2 / 2) - std::max(c1 - w1 / 2, c2 - w2 / 2));
}

/// Closed form for yaw-0 boxes.
inline double axis_aligned_iou(const memsim::Box3D& a, const memsim::Box3D& b) {
  const double inter = overlap_1d(a.center.x, a.dx, b.center.x, b.dx) * overlap_1d(a.center.y, a.dy, b.center.y, b.dy) *
                       overlap_1d(a.center.z, a.dz, b.center.z, b.dz);
  const double uni = a.dx * a.dy * a.dz + b.dx * b.dy * b.dz - inter;
  return inter / uni;
}

struct Scored {
  double confidence;
  bool tp;
};

/// AP by scanning every confidence threshold: each threshold c keeps the
/// detections with confidence >= c and yields one (recall, precision) pair.
/// The interpolated precision at recall r is the best precision over pairs
/// with recall >= r; exact AUC integrates that step function.
inline double brute_force_ap(const std::vector<Scored>& dets, std::size_t total_gt, bool forty_point) {
  if (total_gt == 0) return dets.empty() ? 1.0 : 0.0;
  std::set<double> thresholds;
  for (const auto& d : dets) thresholds.insert(d.confidence);
  std::vector<std::pair<double, double>> pr;  // recall, precision
  for (double c : thresholds) {
    std::size_t kept = 0, tp = 0;
    for (const auto& d : dets)
      if (d.confidence >= c) {
        ++kept;
        tp += d.tp ? 1 : 0;
      }
    pr.emplace_back(static_cast<double>(tp) / static_cast<double>(total_gt),
                    static_cast<double>(tp) / static_cast<double>(kept));
  }
  auto interp = [&](double r) {
    double best = 0.0;
    for (const auto& [rec, prec] : pr)
      if (rec >= r - 1e-15) best = std::max(best, prec);
    return best;
  };
  if (forty_point) {
    double sum = 0.0;
    for (int i = 1; i <= 40; ++i) sum += interp(i / 40.0);
    return sum / 40.0;
  }
  std::set<double> levels;
  for (const auto& p : pr) levels.insert(p.first);
  double area = 0.0, prev = 0.0;
  for (double r : levels) {
    if (r <= prev) continue;
    area += (r - prev) * interp(r);
    prev = r;
  }
  return area;
}

}  // namespace oracle
