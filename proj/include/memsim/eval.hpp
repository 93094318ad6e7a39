#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memsim/dataset.hpp"
#include "memsim/geometry.hpp"
#include "memsim/sensor.hpp"

namespace memsim {

struct Detection {
  Box3D box;
  double confidence = 1.0;
  std::int64_t frame_id = 0;
  std::string cls = "person";
};

using Point2 = std::array<double, 2>;

/// Footprint rectangle of a box, counter-clockwise.
std::array<Point2, 4> footprint(const Box3D& b);

/// Area of the intersection of two convex counter-clockwise polygons
/// (Sutherland-Hodgman clipping + shoelace). Slivers below 1e-12 m^2 count as 0.
double convex_intersection_area(std::span<const Point2> a, std::span<const Point2> b);

/// Rotated 3D IoU: footprint intersection area times vertical overlap.
double iou3d(const Box3D& a, const Box3D& b);

struct FrameMatch {
  /// TP flag per detection, in input order.
  std::vector<bool> true_positive;
  /// IoU with the matched ground truth (0 for false positives), input order.
  std::vector<double> matched_iou;
  std::size_t unmatched_gt = 0;
};

/// Greedy matching: detections by descending confidence (ties: closer box
/// center first, then input order) take the unmatched ground truth of highest
/// IoU when that IoU reaches the threshold.
FrameMatch match_frame(std::span<const Detection> dets, std::span<const Label> gts, double iou_threshold);

struct ScoredDetection {
  double confidence = 0.0;
  bool true_positive = false;
  /// Tie-break keys: distance of the box center to the frame origin, frame, index.
  double distance = 0.0;
  std::int64_t frame_id = 0;
  std::size_t index = 0;
};

enum class ApMode { ExactAuc, FortyPoint };

std::string to_string(ApMode m);
ApMode ap_mode_from_string(const std::string& s);

/// Sorts by descending confidence with the documented tie-breaks.
void sort_by_confidence(std::vector<ScoredDetection>& dets);

/// Average precision. Precision/recall points are taken once per distinct
/// confidence value, so tied detections enter the curve together. With no
/// ground truth the AP is 1 if there are no detections and 0 otherwise.
double average_precision(std::span<const ScoredDetection> dets, std::size_t total_gt, ApMode mode);

struct EvalReport {
  double iou_threshold = 0.5;
  double ap_exact_auc = 0.0;
  double ap_40_point = 0.0;
  /// Per detection along the confidence-sorted sequence.
  std::vector<double> confidence;
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t total_gt = 0;

  double ap(ApMode mode) const { return mode == ApMode::ExactAuc ? ap_exact_auc : ap_40_point; }
  nlohmann::json to_json() const;
};

using FrameDetections = std::map<std::int64_t, std::vector<Detection>>;
using FrameLabels = std::map<std::int64_t, std::vector<Label>>;

/// Every prediction frame must exist in the ground truth; ground-truth frames
/// without predictions contribute only false negatives.
EvalReport evaluate(const FrameDetections& predictions, const FrameLabels& ground_truth, double iou_threshold);

// --- prediction files -------------------------------------------------------------

/// One line per box: class cx cy cz dx dy dz yaw confidence (yaw in radians).
void write_prediction_file(const std::filesystem::path& path, std::span<const Detection> dets);
std::vector<Detection> read_prediction_file(const std::filesystem::path& path, std::int64_t frame_id);

struct PredictionEntry {
  std::filesystem::path predictions;
  std::int64_t frame_id = 0;
};

/// {"entries": [{"frame_id": 0, "predictions": "preds/000000.txt"}, ...]}
struct PredictionManifest {
  std::vector<PredictionEntry> entries;
  nlohmann::json metadata = nlohmann::json::object();
};

PredictionManifest load_prediction_manifest(const std::filesystem::path& path);
void save_prediction_manifest(const std::filesystem::path& path, const PredictionManifest& m);

/// Loads both manifests' files and evaluates. Throws DataError listing every
/// prediction frame_id missing from the ground truth.
EvalReport evaluate(const PredictionManifest& predictions, const DatasetManifest& ground_truth, double iou_threshold);

}  // namespace memsim
