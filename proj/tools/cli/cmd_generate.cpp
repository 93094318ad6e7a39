// simulate, render-depth and ingest subcommands.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "memsim/dataset.hpp"
#include "memsim/depth_io.hpp"
#include "memsim/error.hpp"
#include "memsim/scene_io.hpp"
#include "memsim/sensor.hpp"

namespace memsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_resolution() {
  return std::to_string(kDefaultDepthWidth) + "x" + std::to_string(kDefaultDepthHeight);
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

struct SimulateOptions {
  std::string script;
  std::string out_dir;
  std::string path = "direct";
  std::string resolution = default_resolution();
  double noise_sigma = 0.0;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  int min_points = kDefaultMinPoints;
};

struct FrameSummary {
  std::size_t points = 0;
  std::size_t labels = 0;
};

int run_simulate(const SimulateOptions& o, Streams io) {
  const SceneScript scene = load_scene_script(o.script);
  const bool depth_path = o.path == "depth";
  const auto [width, height] = parse_resolution(o.resolution);
  if (depth_path) depth_camera_for(scene.scan, width, height);
  const std::uint64_t seed = o.seed.value_or(scene.seed);
  const int workers = o.workers > 0 ? o.workers : default_workers();

  const fs::path out(o.out_dir);
  fs::create_directories(out / "frames");
  fs::create_directories(out / "labels");

  const std::size_t n = scene.frame_times.size();
  std::vector<FrameSummary> summary(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const double t = scene.frame_times[i];
    AnnotatedFrame f = depth_path ? simulate_frame_depthpath(scene, t, width, height, o.min_points)
                                  : simulate_frame_direct(scene, t, o.min_points);
    f.cloud.frame_id = static_cast<std::int64_t>(i);
    if (o.noise_sigma > 0.0) {
      f.cloud = add_range_noise(f.cloud, o.noise_sigma, derive_seed(seed, i));
      for (auto& l : f.labels) l.num_points = count_points_in_label(l, f.cloud, scene.mount.tilt);
    }
    const std::string stem = frame_stem(static_cast<std::int64_t>(i));
    write_frame(f.cloud, f.labels, out / "frames" / (stem + ".bin"), out / "labels" / (stem + ".txt"));
    summary[i] = {f.cloud.points.size(), f.labels.size()};
  });

  DatasetManifest m;
  m.seed = seed;
  m.set_convention(FrameConvention::SensorRaw);
  m.metadata["sensor"] = scan_to_json(scene.scan);
  m.metadata["sensor"]["max_range"] = scene.max_range;
  m.metadata["mount"] = mount_to_json(scene.mount);
  m.metadata["generator"] = {{"path", o.path},
                             {"resolution", depth_path ? json(o.resolution) : json(nullptr)},
                             {"noise_sigma", o.noise_sigma},
                             {"min_points", o.min_points}};
  m.metadata["frame_times"] = scene.frame_times;
  std::size_t total_points = 0, total_labels = 0, outside_range = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string stem = frame_stem(static_cast<std::int64_t>(i));
    m.entries.push_back({out / "frames" / (stem + ".bin"), out / "labels" / (stem + ".txt"), Source::Synthetic,
                         static_cast<std::int64_t>(i), std::nullopt});
    total_points += summary[i].points;
    total_labels += summary[i].labels;
    if (summary[i].labels < 3 || summary[i].labels > 10) ++outside_range;
  }
  save_manifest(out / "manifest.json", m);

  if (n == 0) io.err << "warning: scene script has no frame times; wrote an empty manifest\n";
  if (outside_range > 0)
    io.err << "warning: " << outside_range << " of " << n << " frames have fewer than 3 or more than 10 labelled persons\n";
  io.out << "frames: " << n << ", points: " << total_points << ", labels: " << total_labels << '\n';
  return kExitOk;
}

struct RenderOptions {
  std::string script;
  std::string out_dir;
  std::string resolution = default_resolution();
  int workers = 0;
};

int run_render_depth(const RenderOptions& o, Streams io) {
  const SceneScript scene = load_scene_script(o.script);
  const auto [width, height] = parse_resolution(o.resolution);
  const CameraIntrinsics k = depth_camera_for(scene.scan, width, height);
  const RigidTransform pose = mount_to_transform(scene.mount);
  const fs::path out(o.out_dir);
  fs::create_directories(out / "depth");

  const std::size_t n = scene.frame_times.size();
  parallel_for(n, o.workers > 0 ? o.workers : default_workers(), [&](std::size_t i) {
    const DepthImage img = render_depth(scene_at(scene, scene.frame_times[i]), pose, k);
    write_depth_file(out / "depth" / (frame_stem(static_cast<std::int64_t>(i)) + ".mdpt"), img);
  });

  json poses = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json p = transform_to_json(pose);
    p["frame_id"] = i;
    p["time"] = scene.frame_times[i];
    poses.push_back(std::move(p));
  }
  write_json(out / "poses.json", {{"poses", poses}});
  write_json(out / "intrinsics.json", intrinsics_to_json(k));
  write_json(out / "scan.json", scan_to_json(scene.scan));
  io.out << "depth frames: " << n << " (" << width << "x" << height << ")\n";
  return kExitOk;
}

struct IngestOptions {
  std::string depth_dir;
  std::string out_dir;
  std::string poses;
  std::string intrinsics;
  std::string scan_file;
  std::optional<int> scanlines;
  std::optional<int> points_per_line;
  std::optional<double> fov_h_deg;
  std::optional<double> fov_v_deg;
  std::string labels_dir;
  bool keep_partial = false;
  int workers = 0;
};

int run_ingest(const IngestOptions& o, Streams io) {
  std::vector<fs::path> files;
  if (fs::is_directory(o.depth_dir)) {
    for (const auto& e : fs::directory_iterator(o.depth_dir))
      if (e.is_regular_file() && e.path().extension() == ".mdpt") files.push_back(e.path());
  }
  if (files.empty()) throw DataError("no depth frames found in " + o.depth_dir);
  std::sort(files.begin(), files.end());

  const json pose_doc = read_json(o.poses);
  const json& pose_list = pose_doc.contains("poses") ? pose_doc.at("poses") : pose_doc;
  if (!pose_list.is_array()) throw DataError(o.poses + ": expected a list of poses");
  if (pose_list.size() != files.size())
    throw DataError("found " + std::to_string(files.size()) + " depth frames but " + std::to_string(pose_list.size()) +
                    " poses");
  std::vector<RigidTransform> poses;
  std::vector<std::int64_t> frame_ids;
  for (std::size_t i = 0; i < pose_list.size(); ++i) {
    poses.push_back(transform_from_json(pose_list[i]));
    frame_ids.push_back(pose_list[i].value("frame_id", static_cast<std::int64_t>(i)));
  }
  const CameraIntrinsics k = intrinsics_from_json(read_json(o.intrinsics));
  ScanConfig scan = o.scan_file.empty() ? ScanConfig{} : scan_from_json(read_json(o.scan_file));
  if (o.scanlines) scan.num_scanlines = *o.scanlines;
  if (o.points_per_line) scan.points_per_line = *o.points_per_line;
  if (o.fov_h_deg) scan.fov_h = deg_to_rad(*o.fov_h_deg);
  if (o.fov_v_deg) scan.fov_v = deg_to_rad(*o.fov_v_deg);
  scan.validate();

  const fs::path out(o.out_dir);
  fs::create_directories(out / "frames");
  fs::create_directories(out / "labels");

  const std::size_t n = files.size();
  std::vector<std::string> errors(n);
  std::vector<std::size_t> points(n, 0);
  parallel_for(n, o.workers > 0 ? o.workers : default_workers(), [&](std::size_t i) {
    try {
      PointCloudFrame cloud = ingest_external_depth(read_depth_file(files[i]), poses[i], k, scan);
      cloud.frame_id = frame_ids[i];
      std::vector<Label> labels;
      if (!o.labels_dir.empty()) {
        const fs::path lp = fs::path(o.labels_dir) / (files[i].stem().string() + ".txt");
        if (fs::exists(lp)) labels = read_label_file(lp);
      }
      const std::string stem = frame_stem(frame_ids[i]);
      write_frame(cloud, labels, out / "frames" / (stem + ".bin"), out / "labels" / (stem + ".txt"));
      points[i] = cloud.points.size();
    } catch (const std::exception& e) {
      errors[i] = files[i].filename().string() + ": " + e.what();
    }
  });

  const auto failed = static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(), [](auto& e) { return !e.empty(); }));
  DatasetManifest m;
  m.set_convention(FrameConvention::SensorRaw);
  m.metadata["sensor"] = scan_to_json(scan);
  m.metadata["intrinsics"] = intrinsics_to_json(k);
  json pose_meta = json::array();
  json failed_meta = json::array();
  std::size_t total_points = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string stem = frame_stem(frame_ids[i]);
    if (!errors[i].empty()) {
      io.err << "error: " << errors[i] << '\n';
      failed_meta.push_back(files[i].filename().string());
      std::error_code ec;
      fs::remove(out / "frames" / (stem + ".bin"), ec);
      fs::remove(out / "labels" / (stem + ".txt"), ec);
      continue;
    }
    m.entries.push_back({out / "frames" / (stem + ".bin"), out / "labels" / (stem + ".txt"), Source::Synthetic,
                         frame_ids[i], std::nullopt});
    json p = transform_to_json(poses[i]);
    p["frame_id"] = frame_ids[i];
    pose_meta.push_back(std::move(p));
    total_points += points[i];
  }
  m.metadata["poses"] = pose_meta;

  if (failed > 0) {
    if (!o.keep_partial) {
      std::error_code ec;
      for (const auto& e : m.entries) {
        fs::remove(e.frame, ec);
        fs::remove(e.labels, ec);
      }
      io.err << "error: " << failed << " of " << n << " depth frames failed; removed partial output "
             << "(use --keep-partial to keep the frames that succeeded)\n";
      return kExitData;
    }
    m.metadata["failed"] = failed_meta;
    save_manifest(out / "manifest.json", m);
    io.err << "error: " << failed << " of " << n << " depth frames failed; manifest lists the "
           << m.entries.size() << " that succeeded\n";
    return kExitData;
  }
  save_manifest(out / "manifest.json", m);
  io.out << "frames: " << m.entries.size() << ", points: " << total_points << '\n';
  return kExitOk;
}

}  // namespace

Action register_simulate(CLI::App& app) {
  auto o = std::make_shared<SimulateOptions>();
  auto* sub = app.add_subcommand("simulate", "Generate annotated point-cloud frames from a scene script");
  sub->add_option("script", o->script, "Scene script (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("out_dir", o->out_dir, "Output dataset directory")->required();
  sub->add_option("--path", o->path, "Generation path")
      ->check(CLI::IsMember({"direct", "depth"}))
      ->capture_default_str();
  sub->add_option("--resolution", o->resolution, "Depth image size WxH (depth path)")->capture_default_str();
  sub->add_option("--noise-sigma", o->noise_sigma, "Gaussian range noise in meters")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Noise seed (defaults to the script's seed)");
  sub->add_option("--workers", o->workers, std::string("Worker threads (default: $") + kWorkersEnv + " or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--min-points", o->min_points, "Points a person needs to be labelled")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  return [o](Streams io) { return run_simulate(*o, io); };
}

Action register_render_depth(CLI::App& app) {
  auto o = std::make_shared<RenderOptions>();
  auto* sub = app.add_subcommand("render-depth", "Render z-depth frames, poses and intrinsics for a scene script");
  sub->add_option("script", o->script, "Scene script (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("out_dir", o->out_dir, "Output directory")->required();
  sub->add_option("--resolution", o->resolution, "Depth image size WxH")->capture_default_str();
  sub->add_option("--workers", o->workers, "Worker threads")->check(CLI::NonNegativeNumber);
  return [o](Streams io) { return run_render_depth(*o, io); };
}

Action register_ingest(CLI::App& app) {
  auto o = std::make_shared<IngestOptions>();
  auto* sub = app.add_subcommand("ingest", "Turn externally rendered depth frames into point clouds");
  sub->add_option("depth_dir", o->depth_dir, "Directory of .mdpt depth frames")->required();
  sub->add_option("out_dir", o->out_dir, "Output dataset directory")->required();
  sub->add_option("--poses", o->poses, "Pose list (JSON), one per depth frame in file-name order")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--intrinsics", o->intrinsics, "Camera intrinsics (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--scan", o->scan_file, "Scan configuration (JSON, scene-script 'sensor' keys)")
      ->check(CLI::ExistingFile);
  sub->add_option("--scanlines", o->scanlines, "Override scan-line count");
  sub->add_option("--points-per-line", o->points_per_line, "Override points per scan line");
  sub->add_option("--fov-h", o->fov_h_deg, "Override horizontal field of view (degrees)");
  sub->add_option("--fov-v", o->fov_v_deg, "Override vertical field of view (degrees)");
  sub->add_option("--labels-dir", o->labels_dir, "Label files named like the depth frames, merged into the output")
      ->check(CLI::ExistingDirectory);
  sub->add_flag("--keep-partial", o->keep_partial, "Keep frames that succeeded when others fail");
  sub->add_option("--workers", o->workers, "Worker threads")->check(CLI::NonNegativeNumber);
  return [o](Streams io) { return run_ingest(*o, io); };
}

}  // namespace memsim::cli
