#include "memsim/scene_io.hpp"

#include <fstream>

#include "memsim/error.hpp"

namespace memsim {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(what + " must be an array of three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Primitive primitive_from(const json& j, std::size_t index) {
  const std::string where = "statics[" + std::to_string(index) + "]";
  if (!j.contains("type") || !j.contains("id")) throw ValidationError(where + " needs 'type' and 'id'");
  Primitive p;
  p.object_id = j.at("id").get<int>();
  p.reflectivity = j.value("reflectivity", 1.0);
  const auto type = j.at("type").get<std::string>();
  if (type == "ground") {
    p.shape = GroundPlane{j.value("z", 0.0)};
  } else if (type == "box") {
    const Vec3 size = vec3_from(j.at("size"), where + ".size");
    p.shape = Box3D{vec3_from(j.at("center"), where + ".center"), size.x, size.y, size.z,
                    wrap_angle(deg_to_rad(j.value("yaw_deg", 0.0)))};
  } else if (type == "cylinder") {
    p.shape = Cylinder{vec3_from(j.at("base"), where + ".base"), j.at("radius").get<double>(),
                       j.at("height").get<double>()};
  } else if (type == "sphere") {
    p.shape = Sphere{vec3_from(j.at("center"), where + ".center"), j.at("radius").get<double>()};
  } else {
    throw ValidationError(where + " has unknown type '" + type + "'");
  }
  return p;
}

json primitive_to(const Primitive& p) {
  json j{{"id", p.object_id}, {"reflectivity", p.reflectivity}};
  if (const auto* g = std::get_if<GroundPlane>(&p.shape)) {
    j["type"] = "ground";
    j["z"] = g->z;
  } else if (const auto* b = std::get_if<Box3D>(&p.shape)) {
    j["type"] = "box";
    j["center"] = vec3_to(b->center);
    j["size"] = json::array({b->dx, b->dy, b->dz});
    j["yaw_deg"] = rad_to_deg(b->yaw);
  } else if (const auto* c = std::get_if<Cylinder>(&p.shape)) {
    j["type"] = "cylinder";
    j["base"] = vec3_to(c->base);
    j["radius"] = c->radius;
    j["height"] = c->height;
  } else if (const auto* s = std::get_if<Sphere>(&p.shape)) {
    j["type"] = "sphere";
    j["center"] = vec3_to(s->center);
    j["radius"] = s->radius;
  }
  return j;
}

ScenePerson person_from(const json& j, std::size_t index) {
  const std::string where = "persons[" + std::to_string(index) + "]";
  if (!j.contains("id") || !j.contains("waypoints")) throw ValidationError(where + " needs 'id' and 'waypoints'");
  ScenePerson p;
  p.model.object_id = j.at("id").get<int>();
  p.model.height = j.value("height", p.model.height);
  p.model.body_radius = j.value("body_radius", p.model.body_radius);
  p.model.reflectivity = j.value("reflectivity", p.model.reflectivity);
  for (const auto& w : j.at("waypoints")) {
    if (!w.is_array() || w.size() != 2) throw ValidationError(where + ".waypoints entries must be [x, y]");
    p.trajectory.waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
  }
  p.trajectory.speed = j.value("speed", p.trajectory.speed);
  p.trajectory.start_time = j.value("start_time", p.trajectory.start_time);
  return p;
}

std::vector<double> frame_times_from(const json& j) {
  std::vector<double> times;
  if (j.is_array()) {
    for (const auto& t : j) times.push_back(t.get<double>());
  } else if (j.is_object()) {
    const double start = j.value("start", 0.0);
    const double interval = j.at("interval").get<double>();
    const auto count = j.at("count").get<std::int64_t>();
    if (count < 0) throw ValidationError("frame_times.count must be non-negative");
    if (!(interval > 0.0)) throw ValidationError("frame_times.interval must be positive");
    times.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) times.push_back(start + static_cast<double>(i) * interval);
  } else {
    throw ValidationError("frame_times must be a list or {start, interval, count}");
  }
  return times;
}

}  // namespace

ScanConfig scan_from_json(const json& j) {
  ScanConfig s;
  s.num_scanlines = j.value("scanlines", s.num_scanlines);
  s.points_per_line = j.value("points_per_line", s.points_per_line);
  s.fov_h = deg_to_rad(j.value("fov_h_deg", rad_to_deg(s.fov_h)));
  s.fov_v = deg_to_rad(j.value("fov_v_deg", rad_to_deg(s.fov_v)));
  s.frame_rate = j.value("frame_rate", s.frame_rate);
  return s;
}

json scan_to_json(const ScanConfig& s) {
  return {{"scanlines", s.num_scanlines},      {"points_per_line", s.points_per_line},
          {"fov_h_deg", rad_to_deg(s.fov_h)}, {"fov_v_deg", rad_to_deg(s.fov_v)},
          {"frame_rate", s.frame_rate}};
}

SensorMount mount_from_json(const json& j) {
  if (j.contains("preset")) {
    const auto name = j.at("preset").get<std::string>();
    const auto preset = SensorMount::preset(name);
    if (!preset) throw ValidationError("unknown mount preset '" + name + "'");
    return *preset;
  }
  SensorMount m;
  if (j.contains("position")) m.position = vec3_from(j.at("position"), "mount.position");
  if (j.contains("height")) m.position.z = j.at("height").get<double>();
  m.tilt = deg_to_rad(j.value("tilt_deg", rad_to_deg(m.tilt)));
  m.heading = deg_to_rad(j.value("heading_deg", 0.0));
  return m;
}

json mount_to_json(const SensorMount& m) {
  return {{"position", vec3_to(m.position)}, {"tilt_deg", rad_to_deg(m.tilt)}, {"heading_deg", rad_to_deg(m.heading)}};
}

SceneScript scene_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("scene script must be a JSON object");
  try {
    SceneScript s;
    s.seed = doc.value("seed", s.seed);
    if (doc.contains("sensor")) {
      s.scan = scan_from_json(doc.at("sensor"));
      s.max_range = doc.at("sensor").value("max_range", kDefaultMaxRange);
    }
    if (doc.contains("mount")) s.mount = mount_from_json(doc.at("mount"));
    if (doc.contains("statics")) {
      const auto& st = doc.at("statics");
      for (std::size_t i = 0; i < st.size(); ++i) s.statics.push_back(primitive_from(st[i], i));
    }
    if (doc.contains("persons")) {
      const auto& ps = doc.at("persons");
      for (std::size_t i = 0; i < ps.size(); ++i) s.persons.push_back(person_from(ps[i], i));
    }
    if (!doc.contains("frame_times")) throw ValidationError("scene script needs 'frame_times'");
    s.frame_times = frame_times_from(doc.at("frame_times"));
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene script schema error: ") + e.what());
  }
}

json scene_to_json(const SceneScript& s) {
  json sensor = scan_to_json(s.scan);
  sensor["max_range"] = s.max_range;
  json statics = json::array();
  for (const auto& p : s.statics) statics.push_back(primitive_to(p));
  json persons = json::array();
  for (const auto& p : s.persons) {
    json w = json::array();
    for (const auto& wp : p.trajectory.waypoints) w.push_back({wp[0], wp[1]});
    persons.push_back({{"id", p.model.object_id},
                       {"height", p.model.height},
                       {"body_radius", p.model.body_radius},
                       {"reflectivity", p.model.reflectivity},
                       {"waypoints", w},
                       {"speed", p.trajectory.speed},
                       {"start_time", p.trajectory.start_time}});
  }
  return {{"seed", s.seed},       {"sensor", sensor},   {"mount", mount_to_json(s.mount)},
          {"statics", statics},   {"persons", persons}, {"frame_times", s.frame_times}};
}

SceneScript load_scene_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scene script " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return scene_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json transform_to_json(const RigidTransform& t) {
  return {{"rotation", t.rotation.m}, {"translation", vec3_to(t.translation)}};
}

RigidTransform transform_from_json(const json& j) {
  try {
    RigidTransform t;
    const auto& r = j.at("rotation");
    if (!r.is_array() || r.size() != 9) throw ValidationError("rotation must hold 9 numbers (row-major)");
    for (std::size_t i = 0; i < 9; ++i) t.rotation.m[i] = r[i].get<double>();
    t.translation = vec3_from(j.at("translation"), "translation");
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("pose schema error: ") + e.what());
  }
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  try {
    CameraIntrinsics k{j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
                       j.at("cy").get<double>(), j.at("width").get<int>(),  j.at("height").get<int>()};
    k.validate();
    return k;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("intrinsics schema error: ") + e.what());
  }
}

}  // namespace memsim
