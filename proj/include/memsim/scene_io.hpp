#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "memsim/scene.hpp"

namespace memsim {

// Scene-script documents (JSON). Angles are degrees in the file, radians in
// memory; lengths are meters. Schema:
//
//   {
//     "seed": 7,
//     "sensor": {"scanlines": 200, "points_per_line": 100, "fov_h_deg": 72,
//                "fov_v_deg": 30, "frame_rate": 10, "max_range": 75},
//     "mount": {"position": [0, 0, 4], "tilt_deg": 16, "heading_deg": 0},
//              or {"preset": "campus" | "smartfactory-entrance"}
//     "statics": [
//       {"type": "ground", "id": 1, "z": 0, "reflectivity": 0.2},
//       {"type": "box", "id": 2, "center": [x, y, z], "size": [dx, dy, dz], "yaw_deg": 0},
//       {"type": "cylinder", "id": 3, "base": [x, y, z], "radius": r, "height": h},
//       {"type": "sphere", "id": 4, "center": [x, y, z], "radius": r}
//     ],
//     "persons": [
//       {"id": 100, "height": 1.8, "body_radius": 0.25, "reflectivity": 0.5,
//        "waypoints": [[x, y], ...], "speed": 1.4, "start_time": 0}
//     ],
//     "frame_times": [0.0, 0.1, ...]
//                    or {"start": 0, "interval": 0.1, "count": 2100}
//   }
//
// Every key except "frame_times" is optional and falls back to the struct
// defaults; "reflectivity" defaults to 1 for statics and 0.5 for persons.

SceneScript scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const SceneScript& scene);

SceneScript load_scene_script(const std::filesystem::path& path);

nlohmann::json scan_to_json(const ScanConfig& scan);
nlohmann::json mount_to_json(const SensorMount& mount);
SensorMount mount_from_json(const nlohmann::json& j);
ScanConfig scan_from_json(const nlohmann::json& j);

nlohmann::json transform_to_json(const RigidTransform& t);
RigidTransform transform_from_json(const nlohmann::json& j);
nlohmann::json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const nlohmann::json& j);

}  // namespace memsim
