#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "memsim/rng.hpp"
#include "memsim/scene.hpp"
#include "memsim/sensor.hpp"

namespace memsim {

enum class Source { Real, Synthetic };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

struct ManifestEntry {
  std::filesystem::path frame;
  std::filesystem::path labels;
  Source source = Source::Synthetic;
  std::int64_t frame_id = 0;
  /// frame_id in the manifest this entry was drawn from (mixes only).
  std::optional<std::int64_t> origin_frame_id;
};

/// Ordered list of frame/label files. Paths are absolute in memory and stored
/// relative to the manifest file on disk.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;
  nlohmann::json metadata = nlohmann::json::object();

  /// Unique frame ids; when check_files is set every referenced file must exist.
  void validate(bool check_files) const;
  FrameConvention convention() const;
  void set_convention(FrameConvention c);
  std::size_t count(Source s) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);

// --- frame files --------------------------------------------------------------

/// x, y, z, intensity as little-endian float32, 16 bytes per point, no header.
void write_point_file(const std::filesystem::path& path, const PointCloudFrame& frame);
PointCloudFrame read_point_file(const std::filesystem::path& path);

/// One box per line: class cx cy cz dx dy dz yaw object_id num_points, fixed
/// six decimals, yaw in radians. Seven-field lines (no yaw/id/count) are read
/// with yaw 0, object_id -1 and num_points 0.
void write_label_file(const std::filesystem::path& path, const std::vector<Label>& labels);
std::vector<Label> read_label_file(const std::filesystem::path& path);
std::string format_label_line(const Label& label);

void write_frame(const PointCloudFrame& frame, const std::vector<Label>& labels, const std::filesystem::path& point_path,
                 const std::filesystem::path& label_path);
AnnotatedFrame read_frame(const std::filesystem::path& point_path, const std::filesystem::path& label_path,
                          FrameConvention convention);

// --- normalization --------------------------------------------------------------

/// Removes mount tilt and height: p -> Ry(tilt) p + (0, 0, height). The result
/// has its origin on the ground below the sensor, x level-forward, z up.
AnnotatedFrame normalize(const PointCloudFrame& frame, const std::vector<Label>& labels, const SensorMount& mount);
/// Inverse of normalize.
AnnotatedFrame denormalize(const PointCloudFrame& frame, const std::vector<Label>& labels, const SensorMount& mount);

// --- mixing and splitting ---------------------------------------------------------

struct MixSpec {
  double synthetic_fraction = 0.5;
  std::size_t total_count = 0;

  void validate() const;
  /// round-half-up(synthetic_fraction * total_count)
  std::size_t synthetic_count() const;
  std::size_t real_count() const { return total_count - synthetic_count(); }
};

/// Draws without replacement from each pool and interleaves the picks in a
/// seeded shuffled order. Frame ids are renumbered 0..N-1.
DatasetManifest mix(const DatasetManifest& real, const DatasetManifest& synthetic, const MixSpec& spec,
                    std::uint64_t seed);

/// round-half-up(fraction * n), the train/synthetic share of a split or mix.
std::size_t rounded_share(double fraction, std::size_t n);

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& ds, double train_fraction,
                                                  std::uint64_t seed);

// --- augmentation ----------------------------------------------------------------

enum class AugmentOp { Rotate, Scale, Mirror };
enum class MirrorAxis { X, Y };

struct AugmentationSpec {
  AugmentOp op = AugmentOp::Rotate;
  double angle = 0.0;   // Rotate, radians about +z
  double factor = 1.0;  // Scale
  MirrorAxis axis = MirrorAxis::Y;

  void validate() const;
};

/// Bounds for randomized augmentation parameters.
struct AugmentationRanges {
  double max_angle = std::numbers::pi / 4.0;
  double scale_min = 0.95;
  double scale_max = 1.05;
};

/// Draws the random parameter of `op` (rotation uniform in +-max_angle, scale
/// uniform in [scale_min, scale_max]); mirroring uses `axis` unchanged.
AugmentationSpec sample_augmentation(AugmentOp op, MirrorAxis axis, const AugmentationRanges& ranges, Rng& rng);

/// Applies one augmentation to a normalized frame and its labels.
AnnotatedFrame augment(const PointCloudFrame& frame, const std::vector<Label>& labels, const AugmentationSpec& spec);

// --- statistics ------------------------------------------------------------------

struct Distribution {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

Distribution summarize(std::vector<double> values);

struct DatasetStats {
  std::size_t frames = 0;
  std::map<std::size_t, std::size_t> persons_per_frame;  // persons -> frames
  Distribution points_per_frame;
  Distribution points_per_box;
  std::map<std::string, std::size_t> sources;

  nlohmann::json to_json() const;
};

DatasetStats stats(const DatasetManifest& ds);

}  // namespace memsim
