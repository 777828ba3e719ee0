#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ivis/geometry/scene.hpp"

namespace ivis::mask {

using geo::Point2;

// Image-space quadrilateral (pixels, x right, y down) around one mirror.
struct QuadRegion {
    std::array<Point2, 4> corners;
    std::optional<int> mirror_id;

    bool operator==(const QuadRegion&) const = default;
};

// Throws ValidationError naming the offending corners when the quad is
// non-finite, degenerate, non-convex or inconsistently wound. With image
// dimensions given, corners must also fall inside the frame expanded by one
// image size on every side.
void validate(const QuadRegion& quad, int image_w = 0, int image_h = 0);

// Annotations: a JSON file holding the quad list (or an object keyed by image
// id), or a directory of <image_id>.json files.
struct AnnotationSource {
    std::filesystem::path path;
};

// Quads projected from the scene's mirrors through the camera model.
struct ProjectionSource {
    geo::Scene scene;
};

// JSON Lines written by an external region detector:
// {"image_id": ..., "quad": [[x,y] x4], "score"?: s, "mirror_id"?: n}
struct AdapterSource {
    std::filesystem::path path;
    double min_score = 0.0;
};

using RegionSource = std::variant<AnnotationSource, ProjectionSource, AdapterSource>;

std::vector<QuadRegion> identify_regions(const std::string& image_id, const RegionSource& source);

// Pinhole projection of a floor point raised to height z. None when the point
// is at or behind the camera plane.
std::optional<Point2> project_point(const geo::Camera& camera, Point2 p, double z);

// Corners (a, bottom), (b, bottom), (b, top), (a, top) of the mirror footprint.
// Throws InvalidArgument for an unknown mirror id.
std::optional<QuadRegion> project_mirror_to_image(const geo::Scene& scene, int mirror_id);

std::vector<QuadRegion> project_all_mirrors(const geo::Scene& scene);

nlohmann::json to_json(const QuadRegion& quad);
nlohmann::json to_json(const std::vector<QuadRegion>& quads);
QuadRegion quad_from_json(const nlohmann::json& j);
std::vector<QuadRegion> quads_from_json(const nlohmann::json& j);

// Identifies the quads a source yields for an image. Projection sources give
// one key per camera installation; file-backed sources key on the file's path,
// modification time and size so edits invalidate cached masks.
std::string cache_key(const RegionSource& source, const std::string& image_id);

}  // namespace ivis::mask
