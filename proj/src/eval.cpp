#include "memsim/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "memsim/error.hpp"

namespace memsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kSliverArea = 1e-12;

double cross2(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double shoelace(std::span<const Point2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * twice;
}

Point2 line_intersection(const Point2& p, const Point2& q, const Point2& e0, const Point2& e1) {
  const double dp = cross2(e0, e1, p);
  const double dq = cross2(e0, e1, q);
  const double t = dp / (dp - dq);
  return {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
}

}  // namespace

std::array<Point2, 4> footprint(const Box3D& b) {
  const auto corners = box_corners(b);
  return {{{corners[0].x, corners[0].y}, {corners[1].x, corners[1].y}, {corners[2].x, corners[2].y},
           {corners[3].x, corners[3].y}}};
}

double convex_intersection_area(std::span<const Point2> a, std::span<const Point2> b) {
  std::vector<Point2> poly(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size() && !poly.empty(); ++i) {
    const Point2& e0 = b[i];
    const Point2& e1 = b[(i + 1) % b.size()];
    std::vector<Point2> clipped;
    clipped.reserve(poly.size() + 2);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Point2& cur = poly[j];
      const Point2& nxt = poly[(j + 1) % poly.size()];
      const bool cur_in = cross2(e0, e1, cur) >= 0.0;
      const bool nxt_in = cross2(e0, e1, nxt) >= 0.0;
      if (cur_in) clipped.push_back(cur);
      if (cur_in != nxt_in) clipped.push_back(line_intersection(cur, nxt, e0, e1));
    }
    poly = std::move(clipped);
  }
  if (poly.size() < 3) return 0.0;
  const double area = std::abs(shoelace(poly));
  return area < kSliverArea ? 0.0 : area;
}

double iou3d(const Box3D& a, const Box3D& b) {
  if (a.center == b.center && a.dx == b.dx && a.dy == b.dy && a.dz == b.dz && wrap_angle(a.yaw) == wrap_angle(b.yaw))
    return 1.0;
  const double overlap_z = std::min(a.center.z + 0.5 * a.dz, b.center.z + 0.5 * b.dz) -
                           std::max(a.center.z - 0.5 * a.dz, b.center.z - 0.5 * b.dz);
  if (overlap_z <= 0.0) return 0.0;
  const auto fa = footprint(a);
  const auto fb = footprint(b);
  const double inter = convex_intersection_area(fa, fb) * overlap_z;
  const double uni = a.volume() + b.volume() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

FrameMatch match_frame(std::span<const Detection> dets, std::span<const Label> gts, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (dets[i].confidence != dets[j].confidence) return dets[i].confidence > dets[j].confidence;
    return norm(dets[i].box.center) < norm(dets[j].box.center);
  });

  FrameMatch m;
  m.true_positive.assign(dets.size(), false);
  m.matched_iou.assign(dets.size(), 0.0);
  std::vector<bool> used(gts.size(), false);
  for (std::size_t di : order) {
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g]) continue;
      const double iou = iou3d(dets[di].box, gts[g].box);
      if (iou > best) {
        best = iou;
        best_gt = g;
      }
    }
    if (best_gt < gts.size() && best >= iou_threshold) {
      used[best_gt] = true;
      m.true_positive[di] = true;
      m.matched_iou[di] = best;
    }
  }
  m.unmatched_gt = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  return m;
}

std::string to_string(ApMode m) { return m == ApMode::ExactAuc ? "exact-auc" : "40-point"; }

ApMode ap_mode_from_string(const std::string& s) {
  if (s == "exact-auc") return ApMode::ExactAuc;
  if (s == "40-point") return ApMode::FortyPoint;
  throw ValidationError("unknown AP mode '" + s + "' (expected exact-auc or 40-point)");
}

void sort_by_confidence(std::vector<ScoredDetection>& dets) {
  std::sort(dets.begin(), dets.end(), [](const ScoredDetection& a, const ScoredDetection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
    return a.index < b.index;
  });
}

double average_precision(std::span<const ScoredDetection> input, std::size_t total_gt, ApMode mode) {
  if (total_gt == 0) return input.empty() ? 1.0 : 0.0;
  std::vector<ScoredDetection> dets(input.begin(), input.end());
  sort_by_confidence(dets);

  // (recall, precision) at the end of each equal-confidence run.
  std::vector<std::size_t> tp_at;
  std::vector<long double> precision;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    tp += dets[i].true_positive ? 1 : 0;
    if (i + 1 == dets.size() || dets[i + 1].confidence != dets[i].confidence) {
      tp_at.push_back(tp);
      precision.push_back(static_cast<long double>(tp) / static_cast<long double>(i + 1));
    }
  }
  // Envelope: best precision at this recall or beyond.
  for (std::size_t k = precision.size(); k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);

  const auto g = static_cast<long double>(total_gt);
  if (mode == ApMode::ExactAuc) {
    long double area = 0.0L;
    std::size_t prev_tp = 0;
    for (std::size_t k = 0; k < tp_at.size(); ++k) {
      area += static_cast<long double>(tp_at[k] - prev_tp) * precision[k];
      prev_tp = tp_at[k];
    }
    return static_cast<double>(area / g);
  }
  long double sum = 0.0L;
  std::size_t k = 0;
  for (int i = 1; i <= 40; ++i) {
    // Smallest curve point whose recall tp/total_gt reaches i/40.
    while (k < tp_at.size() && static_cast<long double>(tp_at[k]) * 40.0L < static_cast<long double>(i) * g) ++k;
    if (k == tp_at.size()) break;
    sum += precision[k];
  }
  return static_cast<double>(sum / 40.0L);
}

json EvalReport::to_json() const {
  return {{"iou_threshold", iou_threshold},
          {"ap", {{"exact-auc", ap_exact_auc}, {"40-point", ap_40_point}}},
          {"counts", {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"total_gt", total_gt}}},
          {"curve", {{"confidence", confidence}, {"precision", precision}, {"recall", recall}}}};
}

EvalReport evaluate(const FrameDetections& predictions, const FrameLabels& ground_truth, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw ValidationError("IoU threshold must lie in (0, 1]");
  std::vector<std::int64_t> missing;
  for (const auto& [fid, dets] : predictions)
    if (!ground_truth.contains(fid)) missing.push_back(fid);
  if (!missing.empty()) {
    std::string ids;
    for (auto id : missing) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw DataError("prediction frames missing from ground truth: " + ids);
  }

  EvalReport r;
  r.iou_threshold = iou_threshold;
  std::vector<ScoredDetection> scored;
  for (const auto& [fid, gts] : ground_truth) {
    r.total_gt += gts.size();
    const auto it = predictions.find(fid);
    if (it == predictions.end()) {
      r.fn += gts.size();
      continue;
    }
    const auto& dets = it->second;
    for (const auto& d : dets) {
      if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
        throw ValidationError("detection confidence outside [0, 1] in frame " + std::to_string(fid));
    }
    const FrameMatch m = match_frame(dets, gts, iou_threshold);
    r.fn += m.unmatched_gt;
    for (std::size_t i = 0; i < dets.size(); ++i)
      scored.push_back({dets[i].confidence, m.true_positive[i], norm(dets[i].box.center), fid, i});
  }
  sort_by_confidence(scored);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    tp += scored[i].true_positive ? 1 : 0;
    r.confidence.push_back(scored[i].confidence);
    r.precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    r.recall.push_back(r.total_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(r.total_gt));
  }
  r.tp = tp;
  r.fp = scored.size() - tp;
  r.ap_exact_auc = average_precision(scored, r.total_gt, ApMode::ExactAuc);
  r.ap_40_point = average_precision(scored, r.total_gt, ApMode::FortyPoint);
  return r;
}

void write_prediction_file(const fs::path& path, std::span<const Detection> dets) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write prediction file " + path.string());
  char buf[512];
  for (const auto& d : dets) {
    std::snprintf(buf, sizeof(buf), "%s %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f\n", d.cls.c_str(), d.box.center.x,
                  d.box.center.y, d.box.center.z, d.box.dx, d.box.dy, d.box.dz, d.box.yaw, d.confidence);
    out << buf;
  }
}

std::vector<Detection> read_prediction_file(const fs::path& path, std::int64_t frame_id) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prediction file " + path.string());
  std::vector<Detection> dets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    Detection d;
    d.frame_id = frame_id;
    double v[8];
    std::string extra;
    if (!(ss >> d.cls) || !(ss >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5] >> v[6] >> v[7]) || (ss >> extra))
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 'class cx cy cz dx dy dz yaw confidence'");
    d.box = {{v[0], v[1], v[2]}, v[3], v[4], v[5], v[6]};
    d.confidence = v[7];
    try {
      d.box.validate();
    } catch (const ValidationError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": confidence outside [0, 1]");
    dets.push_back(std::move(d));
  }
  return dets;
}

PredictionManifest load_prediction_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prediction manifest " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  PredictionManifest m;
  try {
    const json doc = json::parse(in);
    m.metadata = doc.value("metadata", json::object());
    for (const auto& e : doc.at("entries"))
      m.entries.push_back({(base / e.at("predictions").get<std::string>()).lexically_normal(),
                           e.at("frame_id").get<std::int64_t>()});
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed prediction manifest: " + e.what());
  }
  return m;
}

void save_prediction_manifest(const fs::path& path, const PredictionManifest& m) {
  const fs::path base = fs::absolute(path).parent_path().lexically_normal();
  json entries = json::array();
  for (const auto& e : m.entries)
    entries.push_back(
        {{"frame_id", e.frame_id},
         {"predictions", fs::absolute(e.predictions).lexically_normal().lexically_relative(base).generic_string()}});
  std::ofstream out(path);
  if (!out) throw DataError("cannot write prediction manifest " + path.string());
  out << json{{"metadata", m.metadata}, {"entries", entries}}.dump(2) << '\n';
}

EvalReport evaluate(const PredictionManifest& predictions, const DatasetManifest& ground_truth, double iou_threshold) {
  FrameLabels gts;
  for (const auto& e : ground_truth.entries) gts[e.frame_id] = read_label_file(e.labels);
  FrameDetections preds;
  for (const auto& e : predictions.entries) {
    if (preds.contains(e.frame_id))
      throw DataError("prediction manifest lists frame_id " + std::to_string(e.frame_id) + " twice");
    preds[e.frame_id] = read_prediction_file(e.predictions, e.frame_id);
  }
  return evaluate(preds, gts, iou_threshold);
}

}  // namespace memsim
