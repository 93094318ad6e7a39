// normalize, mix, split, augment and stats subcommands.

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "memsim/dataset.hpp"
#include "memsim/error.hpp"
#include "memsim/scene_io.hpp"

namespace memsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Copies entries with new file locations under out_dir (same frame ids).
DatasetManifest relocated(const DatasetManifest& in, const fs::path& out_dir) {
  DatasetManifest m = in;
  for (auto& e : m.entries) {
    const std::string stem = frame_stem(e.frame_id);
    e.frame = out_dir / "frames" / (stem + ".bin");
    e.labels = out_dir / "labels" / (stem + ".txt");
  }
  return m;
}

struct NormalizeOptions {
  std::string in;
  std::string out_dir;
  std::string preset;
  std::optional<double> height;
  std::optional<double> tilt_deg;
  int workers = 0;
};

SensorMount resolve_mount(const NormalizeOptions& o, const DatasetManifest& in) {
  if (!o.preset.empty()) {
    if (o.height || o.tilt_deg) throw UsageError("--preset cannot be combined with --height/--tilt");
    const auto m = SensorMount::preset(o.preset);
    if (!m) throw UsageError("unknown mount preset '" + o.preset + "' (campus, smartfactory-entrance)");
    return *m;
  }
  if (o.height || o.tilt_deg) {
    if (!o.height || !o.tilt_deg) throw UsageError("--height and --tilt must be given together");
    SensorMount m;
    m.position = {0.0, 0.0, *o.height};
    m.tilt = deg_to_rad(*o.tilt_deg);
    return m;
  }
  if (in.metadata.contains("mount")) return mount_from_json(in.metadata.at("mount"));
  throw UsageError("no mount given: pass --preset or --height/--tilt (the manifest records none)");
}

int run_normalize(const NormalizeOptions& o, Streams io) {
  const DatasetManifest in = load_manifest(o.in);
  if (in.convention() == FrameConvention::Normalized) throw ValidationError(o.in + ": dataset is already normalized");
  const SensorMount mount = resolve_mount(o, in);
  mount.validate();

  const fs::path out(o.out_dir);
  fs::create_directories(out / "frames");
  fs::create_directories(out / "labels");
  DatasetManifest m = relocated(in, out);
  parallel_for(in.entries.size(), o.workers > 0 ? o.workers : default_workers(), [&](std::size_t i) {
    const auto f = read_frame(in.entries[i].frame, in.entries[i].labels, FrameConvention::SensorRaw);
    const auto n = normalize(f.cloud, f.labels, mount);
    write_frame(n.cloud, n.labels, m.entries[i].frame, m.entries[i].labels);
  });
  m.set_convention(FrameConvention::Normalized);
  m.metadata["mount"] = mount_to_json(mount);
  save_manifest(out / "manifest.json", m);
  io.out << "normalized frames: " << m.entries.size() << " (height " << mount.height() << " m, tilt "
         << rad_to_deg(mount.tilt) << " deg)\n";
  return kExitOk;
}

struct MixOptions {
  std::string real;
  std::string synthetic;
  double fraction = 0.5;
  std::size_t total = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

int run_mix(const MixOptions& o, Streams io) {
  const DatasetManifest real = load_manifest(o.real);
  const DatasetManifest syn = load_manifest(o.synthetic);
  const DatasetManifest m = mix(real, syn, {o.fraction, o.total}, o.seed);
  save_manifest(o.out, m);
  io.out << "synthetic: " << m.count(Source::Synthetic) << ", real: " << m.count(Source::Real) << '\n';
  return kExitOk;
}

struct SplitOptions {
  std::string in;
  double train_fraction = 0.7;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir;
};

int run_split(const SplitOptions& o, Streams io) {
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) throw UsageError("--train-fraction must lie in (0, 1)");
  const DatasetManifest in = load_manifest(o.in);
  const auto [train, val] = split(in, o.train_fraction, o.seed);
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  save_manifest(out / "train.json", train);
  save_manifest(out / "validation.json", val);
  io.out << "train: " << train.entries.size() << ", validation: " << val.entries.size() << '\n';
  return kExitOk;
}

struct AugmentOptions {
  std::string in;
  std::string out_dir;
  std::string op;
  std::optional<double> angle_deg;
  double max_angle_deg = 45.0;
  std::optional<double> factor;
  double scale_min = 0.95;
  double scale_max = 1.05;
  std::string axis = "y";
  std::uint64_t seed = kDefaultSeed;
  int workers = 0;
};

int run_augment(const AugmentOptions& o, Streams io) {
  const AugmentOp op = o.op == "rotate" ? AugmentOp::Rotate : o.op == "scale" ? AugmentOp::Scale : AugmentOp::Mirror;
  const MirrorAxis axis = o.axis == "x" ? MirrorAxis::X : MirrorAxis::Y;
  if (o.scale_min > o.scale_max || !(o.scale_min > 0.0)) throw UsageError("need 0 < --scale-min <= --scale-max");
  const AugmentationRanges ranges{deg_to_rad(o.max_angle_deg), o.scale_min, o.scale_max};

  const DatasetManifest in = load_manifest(o.in);
  if (in.convention() != FrameConvention::Normalized)
    throw ValidationError(o.in + ": augmentation needs a normalized dataset (run 'memsim normalize' first)");
  const fs::path out(o.out_dir);
  fs::create_directories(out / "frames");
  fs::create_directories(out / "labels");
  DatasetManifest m = relocated(in, out);
  m.seed = o.seed;

  std::vector<AugmentationSpec> specs(in.entries.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Rng rng(derive_seed(o.seed, static_cast<std::uint64_t>(in.entries[i].frame_id)));
    specs[i] = sample_augmentation(op, axis, ranges, rng);
    if (o.angle_deg) specs[i].angle = deg_to_rad(*o.angle_deg);
    if (o.factor) specs[i].factor = *o.factor;
    specs[i].validate();
  }
  parallel_for(in.entries.size(), o.workers > 0 ? o.workers : default_workers(), [&](std::size_t i) {
    const auto f = read_frame(in.entries[i].frame, in.entries[i].labels, FrameConvention::Normalized);
    const auto a = augment(f.cloud, f.labels, specs[i]);
    write_frame(a.cloud, a.labels, m.entries[i].frame, m.entries[i].labels);
  });
  json aug{{"op", o.op}, {"seed", o.seed}};
  if (op == AugmentOp::Mirror) aug["axis"] = o.axis;
  if (op == AugmentOp::Rotate) {
    if (o.angle_deg) aug["angle_deg"] = *o.angle_deg;
    else aug["max_angle_deg"] = o.max_angle_deg;
  }
  if (op == AugmentOp::Scale) {
    if (o.factor) aug["factor"] = *o.factor;
    else aug["scale_range"] = {o.scale_min, o.scale_max};
  }
  m.metadata["augmentation"] = aug;
  save_manifest(out / "manifest.json", m);
  io.out << "augmented frames: " << m.entries.size() << " (" << o.op << ")\n";
  return kExitOk;
}

struct StatsOptions {
  std::string in;
  std::string out;
};

int run_stats(const StatsOptions& o, Streams io) {
  const json report = stats(load_manifest(o.in)).to_json();
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw DataError("cannot write " + o.out);
    f << report.dump(2) << '\n';
  }
  io.out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

Action register_normalize(CLI::App& app) {
  auto o = std::make_shared<NormalizeOptions>();
  auto* sub = app.add_subcommand("normalize", "Remove mount tilt and height from a sensor-raw dataset");
  sub->add_option("in_manifest", o->in, "Input manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("out_dir", o->out_dir, "Output dataset directory")->required();
  sub->add_option("--preset", o->preset, "Mount preset: campus (4 m, 16 deg) or smartfactory-entrance (5 m, 23 deg)");
  sub->add_option("--height", o->height, "Mount height in meters");
  sub->add_option("--tilt", o->tilt_deg, "Mount downward tilt in degrees");
  sub->add_option("--workers", o->workers, "Worker threads")->check(CLI::NonNegativeNumber);
  return [o](Streams io) { return run_normalize(*o, io); };
}

Action register_mix(CLI::App& app) {
  auto o = std::make_shared<MixOptions>();
  auto* sub = app.add_subcommand("mix", "Compose a dataset from real and synthetic pools");
  sub->add_option("--real", o->real, "Real-data manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("--synthetic", o->synthetic, "Synthetic-data manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("--synthetic-fraction", o->fraction, "Share of synthetic frames")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--total", o->total, "Frames in the mixed dataset")->required();
  sub->add_option("--seed", o->seed, "Sampling seed")->capture_default_str();
  sub->add_option("--out", o->out, "Output manifest path")->required();
  return [o](Streams io) { return run_mix(*o, io); };
}

Action register_split(CLI::App& app) {
  auto o = std::make_shared<SplitOptions>();
  auto* sub = app.add_subcommand("split", "Seeded train/validation split");
  sub->add_option("in_manifest", o->in, "Input manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("--train-fraction", o->train_fraction, "Share of frames for training")->capture_default_str();
  sub->add_option("--seed", o->seed, "Shuffle seed")->capture_default_str();
  sub->add_option("--out-dir", o->out_dir, "Directory for train.json and validation.json")->required();
  return [o](Streams io) { return run_split(*o, io); };
}

Action register_augment(CLI::App& app) {
  auto o = std::make_shared<AugmentOptions>();
  auto* sub = app.add_subcommand("augment", "Rotate, scale or mirror a normalized dataset");
  sub->add_option("in_manifest", o->in, "Input manifest (normalized)")->required()->check(CLI::ExistingFile);
  sub->add_option("out_dir", o->out_dir, "Output dataset directory")->required();
  sub->add_option("--op", o->op, "Augmentation")->required()->check(CLI::IsMember({"rotate", "scale", "mirror"}));
  sub->add_option("--angle", o->angle_deg, "Fixed rotation in degrees (default: random per frame)");
  sub->add_option("--max-angle", o->max_angle_deg, "Random rotation bound in degrees")->capture_default_str();
  sub->add_option("--factor", o->factor, "Fixed scale factor (default: random per frame)");
  sub->add_option("--scale-min", o->scale_min, "Random scale lower bound")->capture_default_str();
  sub->add_option("--scale-max", o->scale_max, "Random scale upper bound")->capture_default_str();
  sub->add_option("--axis", o->axis, "Mirror axis")->check(CLI::IsMember({"x", "y"}))->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for per-frame random parameters")->capture_default_str();
  sub->add_option("--workers", o->workers, "Worker threads")->check(CLI::NonNegativeNumber);
  return [o](Streams io) { return run_augment(*o, io); };
}

Action register_stats(CLI::App& app) {
  auto o = std::make_shared<StatsOptions>();
  auto* sub = app.add_subcommand("stats", "Summarize a dataset");
  sub->add_option("in_manifest", o->in, "Input manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Also write the report to this JSON file");
  return [o](Streams io) { return run_stats(*o, io); };
}

}  // namespace memsim::cli
