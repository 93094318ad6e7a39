#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include <unistd.h>

#include "memsim/rng.hpp"
#include "memsim/scene.hpp"
#include "memsim/eval.hpp"
#include "memsim/sensor.hpp"

namespace fixture {

/// Ground plane plus 3-10 people walking straight lines in front of a campus
/// mount. Person ids start at 100; the ground is id 1.
inline memsim::SceneScript crowd_scene(std::uint64_t seed, int num_frames, double interval = 0.1) {
  memsim::Rng rng(seed);
  memsim::SceneScript s;
  s.seed = seed;
  s.mount = memsim::SensorMount::campus();
  s.statics.push_back({memsim::GroundPlane{0.0}, 1, 0.2});
  const int n = 3 + static_cast<int>(rng.below(8));
  for (int i = 0; i < n; ++i) {
    memsim::ScenePerson p;
    p.model.object_id = 100 + i;
    p.model.height = rng.uniform(1.5, 1.95);
    p.model.body_radius = rng.uniform(0.2, 0.3);
    const double x = rng.uniform(9.0, 28.0);
    const double y = rng.uniform(-0.45, 0.45) * x;
    const double dir = rng.uniform(-3.14159, 3.14159);
    p.trajectory.waypoints = {{x, y}, {x + 6.0 * std::cos(dir), y + 6.0 * std::sin(dir)}};
    p.trajectory.speed = rng.uniform(0.8, 1.6);
    s.persons.push_back(p);
  }
  for (int f = 0; f < num_frames; ++f) s.frame_times.push_back(f * interval);
  return s;
}

struct PathDeviation {
  std::size_t paired = 0;
  std::size_t unpaired = 0;
  /// deviation[i] and range[i] of each paired point (range of the direct point).
  std::vector<double> deviation;
  std::vector<double> range;
};

/// Pairs the points of two clouds of the same scan by sample index.
inline PathDeviation compare_paths(const memsim::PointCloudFrame& direct, const memsim::PointCloudFrame& depth) {
  std::unordered_map<std::uint32_t, std::size_t> at;
  for (std::size_t i = 0; i < direct.points.size(); ++i) at[direct.sample_index[i]] = i;
  PathDeviation out;
  for (std::size_t j = 0; j < depth.points.size(); ++j) {
    const auto it = at.find(depth.sample_index[j]);
    if (it == at.end()) {
      ++out.unpaired;
      continue;
    }
    const auto a = direct.points[it->second].position(), b = depth.points[j].position();
    out.deviation.push_back(memsim::norm(a - b));
    out.range.push_back(memsim::norm(a));
    ++out.paired;
  }
  out.unpaired += direct.points.size() - out.paired;
  return out;
}

inline memsim::Label person_label(double x, double y, int id) {
  memsim::Label l;
  l.box = {{x, y, 0.875}, 0.5, 0.5, 1.75, 0.0};
  l.object_id = id;
  l.num_points = 20;
  return l;
}

inline memsim::Detection detection_on(const memsim::Label& l, double confidence, std::int64_t frame_id) {
  return {l.box, confidence, frame_id, "person"};
}

/// Five frames, two persons. Sorted by confidence the detections are
/// TP (0.9, frame 0), FP (0.8, frame 1), TP (0.7, frame 2); frames 3 and 4
/// are empty. Precision is 1, 1/2, 2/3 at recall 1/2, 1/2, 1, so the
/// exact-auc AP is 1/2 * 1 + 1/2 * 2/3 = 5/6.
struct MicroBenchmark {
  memsim::FrameDetections predictions;
  memsim::FrameLabels ground_truth;
};

inline MicroBenchmark micro_benchmark() {
  MicroBenchmark m;
  for (std::int64_t f = 0; f < 5; ++f) {
    m.ground_truth[f] = {};
    m.predictions[f] = {};
  }
  const auto a = person_label(10.0, 1.0, 100), b = person_label(14.0, -2.0, 101);
  m.ground_truth[0] = {a};
  m.ground_truth[2] = {b};
  m.predictions[0] = {detection_on(a, 0.9, 0)};
  m.predictions[1] = {detection_on(person_label(8.0, 3.0, -1), 0.8, 1)};
  auto off = b;
  off.box.center.x += 0.05;  // IoU 9/11 with b
  m.predictions[2] = {detection_on(off, 0.7, 2)};
  return m;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("memsim_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
