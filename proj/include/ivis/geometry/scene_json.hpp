#pragma once

// Scene document format (lengths in meters, angles in radians):
//
// {
//   "plan":    {"boundary": [[x, y], ...], "obstacles": [[[x, y], ...], ...]},
//   "camera":  {"position": [x, y], "yaw": r, "fov": r, "height": m, "pitch": r,
//               "focal": px, "image_w": px, "image_h": px},
//   "mirrors": [{"id": n, "segment": [[x, y], [x, y]], "facing": [nx, ny],
//                "z_bottom": m, "z_top": m,
//                "curvature": {"kind": "flat"} |
//                             {"kind": "convex", "radius": m, "facet_count": n}}],
//   "zones":   [{"id": n, "kind": "target" | "non_interest", "polygon": [[x, y], ...]}],
//   "markers": [[x, y], ...]
// }
//
// Optional: obstacles, mirrors, zones, markers, curvature (flat), and every
// camera field except position (defaults: yaw 0, fov 2pi, height 2.5,
// pitch 0, focal 500, 640x480).

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ivis/geometry/scene.hpp"

namespace ivis::geo {

nlohmann::json to_json(Point2 p);
nlohmann::json to_json(const Polygon& poly);
nlohmann::json to_json(const Mirror& m);
nlohmann::json to_json(const Scene& scene);

Point2 point_from_json(const nlohmann::json& j);
Polygon polygon_from_json(const nlohmann::json& j);
Mirror mirror_from_json(const nlohmann::json& j);

// Parses and validates; throws ValidationError on schema or invariant problems.
Scene scene_from_json(const nlohmann::json& j);
Scene parse_scene(const std::string& text);

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace ivis::geo
