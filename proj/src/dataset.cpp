#include "memsim/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "memsim/detail/little_endian.hpp"
#include "memsim/error.hpp"

namespace memsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Source s) { return s == Source::Real ? "real" : "synthetic"; }

Source source_from_string(const std::string& s) {
  if (s == "real") return Source::Real;
  if (s == "synthetic") return Source::Synthetic;
  throw ValidationError("unknown source '" + s + "' (expected real or synthetic)");
}

void DatasetManifest::validate(bool check_files) const {
  std::set<std::int64_t> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.frame_id).second) throw ValidationError("duplicate frame_id " + std::to_string(e.frame_id));
    if (check_files) {
      if (!fs::exists(e.frame)) throw DataError("missing point file " + e.frame.string());
      if (!fs::exists(e.labels)) throw DataError("missing label file " + e.labels.string());
    }
  }
}

FrameConvention DatasetManifest::convention() const {
  if (!metadata.contains("frame_convention")) return FrameConvention::SensorRaw;
  return frame_convention_from_string(metadata.at("frame_convention").get<std::string>());
}

void DatasetManifest::set_convention(FrameConvention c) { metadata["frame_convention"] = to_string(c); }

std::size_t DatasetManifest::count(Source s) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [s](const ManifestEntry& e) { return e.source == s; }));
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  DatasetManifest m;
  try {
    const json doc = json::parse(in);
    m.seed = doc.value("seed", std::uint64_t{0});
    m.metadata = doc.value("metadata", json::object());
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.frame = (base / e.at("frame").get<std::string>()).lexically_normal();
      entry.labels = (base / e.at("labels").get<std::string>()).lexically_normal();
      entry.source = source_from_string(e.at("source").get<std::string>());
      entry.frame_id = e.at("frame_id").get<std::int64_t>();
      if (e.contains("origin_frame_id")) entry.origin_frame_id = e.at("origin_frame_id").get<std::int64_t>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed manifest: " + e.what());
  }
  try {
    m.validate(true);
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
  m.validate(false);
  const fs::path base = fs::absolute(path).parent_path().lexically_normal();
  json entries = json::array();
  for (const auto& e : m.entries) {
    json j{{"frame", fs::absolute(e.frame).lexically_normal().lexically_relative(base).generic_string()},
           {"labels", fs::absolute(e.labels).lexically_normal().lexically_relative(base).generic_string()},
           {"source", to_string(e.source)},
           {"frame_id", e.frame_id}};
    if (e.origin_frame_id) j["origin_frame_id"] = *e.origin_frame_id;
    entries.push_back(std::move(j));
  }
  const json doc{{"seed", m.seed}, {"metadata", m.metadata}, {"entries", entries}};
  if (!base.empty()) fs::create_directories(base);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

void write_point_file(const fs::path& path, const PointCloudFrame& frame) {
  std::vector<unsigned char> buf(16 * frame.points.size());
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const auto& p = frame.points[i];
    unsigned char* out = &buf[16 * i];
    detail::store_f32_le(out, static_cast<float>(p.x));
    detail::store_f32_le(out + 4, static_cast<float>(p.y));
    detail::store_f32_le(out + 8, static_cast<float>(p.z));
    detail::store_f32_le(out + 12, static_cast<float>(p.intensity));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write point file " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("short write to " + path.string());
}

PointCloudFrame read_point_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open point file " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() % 16 != 0)
    throw DataError(path.string() + ": size " + std::to_string(buf.size()) + " is not a multiple of 16 bytes");
  PointCloudFrame frame;
  frame.points.resize(buf.size() / 16);
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const unsigned char* in_p = &buf[16 * i];
    frame.points[i] = {detail::load_f32_le(in_p), detail::load_f32_le(in_p + 4), detail::load_f32_le(in_p + 8),
                       detail::load_f32_le(in_p + 12)};
  }
  return frame;
}

std::string format_label_line(const Label& l) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s %.6f %.6f %.6f %.6f %.6f %.6f %.6f %d %d", l.cls.c_str(), l.box.center.x,
                l.box.center.y, l.box.center.z, l.box.dx, l.box.dy, l.box.dz, l.box.yaw, l.object_id, l.num_points);
  return buf;
}

void write_label_file(const fs::path& path, const std::vector<Label>& labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write label file " + path.string());
  for (const auto& l : labels) out << format_label_line(l) << '\n';
}

std::vector<Label> read_label_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file " + path.string());
  std::vector<Label> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string f; ss >> f;) fields.push_back(f);
    auto fail = [&](const std::string& why) {
      return DataError(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 7 && fields.size() != 8 && fields.size() != 10)
      throw fail("expected 7, 8 or 10 fields, found " + std::to_string(fields.size()));
    Label l;
    l.cls = fields[0];
    l.object_id = -1;
    try {
      std::size_t used = 0;
      auto num = [&](const std::string& s) {
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
      };
      auto integer = [&](const std::string& s) {
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<int>(v);
      };
      l.box.center = {num(fields[1]), num(fields[2]), num(fields[3])};
      l.box.dx = num(fields[4]);
      l.box.dy = num(fields[5]);
      l.box.dz = num(fields[6]);
      if (fields.size() >= 8) l.box.yaw = num(fields[7]);
      if (fields.size() == 10) {
        l.object_id = integer(fields[8]);
        l.num_points = integer(fields[9]);
      }
    } catch (const std::exception&) {
      throw fail("malformed number");
    }
    try {
      l.box.validate();
    } catch (const ValidationError& e) {
      throw fail(e.what());
    }
    if (l.num_points < 0) throw fail("negative num_points");
    labels.push_back(std::move(l));
  }
  return labels;
}

void write_frame(const PointCloudFrame& frame, const std::vector<Label>& labels, const fs::path& point_path,
                 const fs::path& label_path) {
  frame.validate();
  write_point_file(point_path, frame);
  write_label_file(label_path, labels);
}

AnnotatedFrame read_frame(const fs::path& point_path, const fs::path& label_path, FrameConvention convention) {
  AnnotatedFrame f;
  f.cloud = read_point_file(point_path);
  f.cloud.convention = convention;
  f.labels = read_label_file(label_path);
  return f;
}

namespace {

AnnotatedFrame map_frame(const PointCloudFrame& frame, const std::vector<Label>& labels, const Mat3& r,
                         const Vec3& shift) {
  AnnotatedFrame out{frame, labels};
  for (auto& p : out.cloud.points) {
    const Vec3 q = r * p.position() + shift;
    p.x = q.x;
    p.y = q.y;
    p.z = q.z;
  }
  for (auto& l : out.labels) l.box.center = r * l.box.center + shift;
  return out;
}

}  // namespace

AnnotatedFrame normalize(const PointCloudFrame& frame, const std::vector<Label>& labels, const SensorMount& mount) {
  if (frame.convention == FrameConvention::Normalized) throw ValidationError("frame is already normalized");
  mount.validate();
  // Label yaw already refers to the levelled frame, so only centers move.
  AnnotatedFrame out = map_frame(frame, labels, rotation_y(mount.tilt), {0.0, 0.0, mount.height()});
  out.cloud.convention = FrameConvention::Normalized;
  return out;
}

AnnotatedFrame denormalize(const PointCloudFrame& frame, const std::vector<Label>& labels, const SensorMount& mount) {
  if (frame.convention != FrameConvention::Normalized) throw ValidationError("frame is not normalized");
  mount.validate();
  const Mat3 back = rotation_y(mount.tilt).transposed();
  AnnotatedFrame out = map_frame(frame, labels, back, back * Vec3{0.0, 0.0, -mount.height()});
  out.cloud.convention = FrameConvention::SensorRaw;
  return out;
}

std::size_t rounded_share(double fraction, std::size_t n) {
  // The epsilon keeps decimal halves (e.g. 0.35 * 10) rounding up.
  const double share = std::floor(fraction * static_cast<double>(n) + 0.5 + 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, share)));
}

void MixSpec::validate() const {
  if (!(synthetic_fraction >= 0.0 && synthetic_fraction <= 1.0))
    throw ValidationError("synthetic fraction must lie in [0, 1]");
}

std::size_t MixSpec::synthetic_count() const { return rounded_share(synthetic_fraction, total_count); }

namespace {

std::vector<ManifestEntry> draw(const DatasetManifest& pool, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(pool.entries.size());
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(std::span<std::size_t>(idx));
  std::vector<ManifestEntry> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) picked.push_back(pool.entries[idx[i]]);
  return picked;
}

}  // namespace

DatasetManifest mix(const DatasetManifest& real, const DatasetManifest& synthetic, const MixSpec& spec,
                    std::uint64_t seed) {
  spec.validate();
  const std::size_t n_syn = spec.synthetic_count();
  const std::size_t n_real = spec.real_count();
  std::string shortage;
  if (synthetic.entries.size() < n_syn)
    shortage += "synthetic pool has " + std::to_string(synthetic.entries.size()) + " frames, needs " +
                std::to_string(n_syn) + " (short by " + std::to_string(n_syn - synthetic.entries.size()) + ")";
  if (real.entries.size() < n_real) {
    if (!shortage.empty()) shortage += "; ";
    shortage += "real pool has " + std::to_string(real.entries.size()) + " frames, needs " + std::to_string(n_real) +
                " (short by " + std::to_string(n_real - real.entries.size()) + ")";
  }
  if (!shortage.empty()) throw DataError(shortage);
  if (n_syn > 0 && n_real > 0 && real.convention() != synthetic.convention())
    throw ValidationError("cannot mix " + to_string(real.convention()) + " real frames with " +
                          to_string(synthetic.convention()) + " synthetic frames");

  Rng rng(seed);
  auto picks = draw(synthetic, n_syn, rng);
  auto real_picks = draw(real, n_real, rng);
  for (auto& e : picks) e.source = Source::Synthetic;
  for (auto& e : real_picks) e.source = Source::Real;
  picks.insert(picks.end(), real_picks.begin(), real_picks.end());
  rng.shuffle(std::span<ManifestEntry>(picks));

  DatasetManifest out;
  out.seed = seed;
  out.set_convention(n_syn > 0 ? synthetic.convention() : real.convention());
  out.metadata["mix"] = {{"synthetic_fraction", spec.synthetic_fraction},
                         {"total", spec.total_count},
                         {"synthetic", n_syn},
                         {"real", n_real}};
  for (std::size_t i = 0; i < picks.size(); ++i) {
    picks[i].origin_frame_id = picks[i].frame_id;
    picks[i].frame_id = static_cast<std::int64_t>(i);
  }
  out.entries = std::move(picks);
  return out;
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& ds, double train_fraction,
                                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train fraction must lie in (0, 1)");
  std::vector<ManifestEntry> shuffled = ds.entries;
  Rng rng(seed);
  rng.shuffle(std::span<ManifestEntry>(shuffled));
  const std::size_t n_train = rounded_share(train_fraction, shuffled.size());

  DatasetManifest train, val;
  train.seed = val.seed = seed;
  train.metadata = val.metadata = ds.metadata;
  train.metadata["split"] = {{"part", "train"}, {"train_fraction", train_fraction}};
  val.metadata["split"] = {{"part", "validation"}, {"train_fraction", train_fraction}};
  train.entries.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
  val.entries.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
  return {std::move(train), std::move(val)};
}

void AugmentationSpec::validate() const {
  if (op == AugmentOp::Scale && (!(factor > 0.0) || !std::isfinite(factor)))
    throw ValidationError("scale factor must be positive");
  if (op == AugmentOp::Rotate && !std::isfinite(angle)) throw ValidationError("rotation angle must be finite");
}

AugmentationSpec sample_augmentation(AugmentOp op, MirrorAxis axis, const AugmentationRanges& ranges, Rng& rng) {
  AugmentationSpec spec;
  spec.op = op;
  spec.axis = axis;
  if (op == AugmentOp::Rotate) spec.angle = rng.uniform(-ranges.max_angle, ranges.max_angle);
  if (op == AugmentOp::Scale) spec.factor = rng.uniform(ranges.scale_min, ranges.scale_max);
  return spec;
}

AnnotatedFrame augment(const PointCloudFrame& frame, const std::vector<Label>& labels, const AugmentationSpec& spec) {
  spec.validate();
  if (frame.convention != FrameConvention::Normalized)
    throw ValidationError("augmentation needs a normalized (level) frame");
  AnnotatedFrame out{frame, labels};
  switch (spec.op) {
    case AugmentOp::Rotate: {
      const Mat3 r = rotation_z(spec.angle);
      for (auto& p : out.cloud.points) {
        const Vec3 q = r * p.position();
        p.x = q.x;
        p.y = q.y;
        p.z = q.z;
      }
      for (auto& l : out.labels) {
        l.box.center = r * l.box.center;
        l.box.yaw = wrap_angle(l.box.yaw + spec.angle);
      }
      break;
    }
    case AugmentOp::Scale: {
      const double f = spec.factor;
      for (auto& p : out.cloud.points) {
        p.x *= f;
        p.y *= f;
        p.z *= f;
      }
      for (auto& l : out.labels) {
        l.box.center = l.box.center * f;
        l.box.dx *= f;
        l.box.dy *= f;
        l.box.dz *= f;
      }
      break;
    }
    case AugmentOp::Mirror: {
      const bool flip_y = spec.axis == MirrorAxis::Y;
      for (auto& p : out.cloud.points) (flip_y ? p.y : p.x) = -(flip_y ? p.y : p.x);
      for (auto& l : out.labels) {
        auto& c = l.box.center;
        if (flip_y) {
          c.y = -c.y;
          l.box.yaw = wrap_angle(-l.box.yaw);
        } else {
          c.x = -c.x;
          l.box.yaw = wrap_angle(std::numbers::pi - l.box.yaw);
        }
      }
      break;
    }
  }
  return out;
}

Distribution summarize(std::vector<double> values) {
  Distribution d;
  d.count = values.size();
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.min = values.front();
  d.max = values.back();
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const std::size_t mid = values.size() / 2;
  d.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return d;
}

namespace {
json distribution_json(const Distribution& d) {
  return {{"count", d.count}, {"min", d.min}, {"max", d.max}, {"mean", d.mean}, {"median", d.median}};
}
}  // namespace

json DatasetStats::to_json() const {
  json hist = json::object();
  for (const auto& [persons, n] : persons_per_frame) hist[std::to_string(persons)] = n;
  return {{"frames", frames},
          {"persons_per_frame", hist},
          {"points_per_frame", distribution_json(points_per_frame)},
          {"points_per_box", distribution_json(points_per_box)},
          {"sources", sources}};
}

DatasetStats stats(const DatasetManifest& ds) {
  DatasetStats s;
  s.sources = {{"real", 0}, {"synthetic", 0}};
  std::vector<double> per_frame, per_box;
  for (const auto& e : ds.entries) {
    const auto f = read_frame(e.frame, e.labels, ds.convention());
    ++s.frames;
    ++s.persons_per_frame[f.labels.size()];
    ++s.sources[to_string(e.source)];
    per_frame.push_back(static_cast<double>(f.cloud.points.size()));
    for (const auto& l : f.labels) per_box.push_back(l.num_points);
  }
  s.points_per_frame = summarize(std::move(per_frame));
  s.points_per_box = summarize(std::move(per_box));
  return s;
}

}  // namespace memsim
