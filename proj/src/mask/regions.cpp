#include "ivis/mask/regions.hpp"

#include <cmath>
#include <sstream>

#include "ivis/error.hpp"
#include "ivis/geometry/scene_json.hpp"
#include "ivis/mask/image.hpp"

namespace ivis::mask {

namespace {

std::string fmt(Point2 p) {
    std::ostringstream ss;
    ss << "(" << p.x << ", " << p.y << ")";
    return ss.str();
}

std::string fmt_corners(const QuadRegion& q, std::initializer_list<int> which) {
    std::string out;
    for (int k : which) {
        if (!out.empty()) out += ", ";
        out += "corner " + std::to_string(k) + " " + fmt(q.corners[static_cast<std::size_t>(k)]);
    }
    return out;
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

}  // namespace

void validate(const QuadRegion& q, int image_w, int image_h) {
    for (int k = 0; k < 4; ++k) {
        if (!geo::is_finite(q.corners[static_cast<std::size_t>(k)])) {
            throw ValidationError("quad has a non-finite " + fmt_corners(q, {k}));
        }
    }
    int pos = 0, neg = 0;
    for (int k = 0; k < 4; ++k) {
        const Point2 a = q.corners[static_cast<std::size_t>(k)];
        const Point2 b = q.corners[static_cast<std::size_t>((k + 1) % 4)];
        const Point2 c = q.corners[static_cast<std::size_t>((k + 2) % 4)];
        const double turn = geo::cross(b - a, c - b);
        if (turn > 1e-9) ++pos;
        if (turn < -1e-9) ++neg;
        if (std::abs(turn) <= 1e-9) {
            throw ValidationError("quad is degenerate at " + fmt_corners(q, {k, (k + 1) % 4, (k + 2) % 4}));
        }
    }
    if (pos != 4 && neg != 4) {
        throw ValidationError("quad is not convex or not consistently wound: " + fmt_corners(q, {0, 1, 2, 3}));
    }
    if (image_w > 0 && image_h > 0) {
        for (int k = 0; k < 4; ++k) {
            const Point2 p = q.corners[static_cast<std::size_t>(k)];
            if (p.x < -image_w || p.x > 2.0 * image_w || p.y < -image_h || p.y > 2.0 * image_h) {
                throw ValidationError("quad corner far outside the image: " + fmt_corners(q, {k}));
            }
        }
    }
}

nlohmann::json to_json(const QuadRegion& q) {
    nlohmann::json corners = nlohmann::json::array();
    for (const auto& p : q.corners) corners.push_back({p.x, p.y});
    nlohmann::json j = {{"corners", corners}};
    if (q.mirror_id) j["mirror_id"] = *q.mirror_id;
    return j;
}

nlohmann::json to_json(const std::vector<QuadRegion>& quads) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& q : quads) out.push_back(to_json(q));
    return out;
}

namespace {

QuadRegion quad_from_points(const nlohmann::json& pts) {
    if (!pts.is_array() || pts.size() != 4) throw ValidationError("quad needs exactly 4 corners");
    QuadRegion q;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& p = pts[k];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ValidationError("quad corner " + std::to_string(k) + " must be [x, y]");
        }
        q.corners[k] = {p[0].get<double>(), p[1].get<double>()};
    }
    return q;
}

}  // namespace

QuadRegion quad_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("corners")) throw ValidationError("quad entry needs \"corners\"");
    QuadRegion q = quad_from_points(j.at("corners"));
    if (j.contains("mirror_id") && !j.at("mirror_id").is_null()) {
        if (!j.at("mirror_id").is_number_integer()) throw ValidationError("mirror_id must be an integer");
        q.mirror_id = j.at("mirror_id").get<int>();
    }
    validate(q);
    return q;
}

std::vector<QuadRegion> quads_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ValidationError("region annotation must be a JSON list");
    std::vector<QuadRegion> out;
    for (const auto& e : j) out.push_back(quad_from_json(e));
    return out;
}

std::optional<Point2> project_point(const geo::Camera& cam, Point2 p, double z) {
    const double cy = std::cos(cam.yaw), sy = std::sin(cam.yaw);
    const double cp = std::cos(cam.pitch), sp = std::sin(cam.pitch);
    const double fwd[3] = {cy * cp, sy * cp, -sp};
    const double right[3] = {sy, -cy, 0.0};
    // up = right x forward
    const double up[3] = {right[1] * fwd[2] - right[2] * fwd[1], right[2] * fwd[0] - right[0] * fwd[2],
                          right[0] * fwd[1] - right[1] * fwd[0]};
    const double d[3] = {p.x - cam.position.x, p.y - cam.position.y, z - cam.height};
    const double zc = d[0] * fwd[0] + d[1] * fwd[1] + d[2] * fwd[2];
    if (!(zc > 1e-9)) return std::nullopt;
    const double xc = d[0] * right[0] + d[1] * right[1] + d[2] * right[2];
    const double yc = d[0] * up[0] + d[1] * up[1] + d[2] * up[2];
    return Point2{cam.image_w / 2.0 + cam.focal * xc / zc, cam.image_h / 2.0 - cam.focal * yc / zc};
}

std::optional<QuadRegion> project_mirror_to_image(const geo::Scene& scene, int mirror_id) {
    const geo::Mirror* m = scene.find_mirror(mirror_id);
    if (!m) throw InvalidArgument("no mirror with id " + std::to_string(mirror_id));
    const std::pair<Point2, double> corners3d[4] = {
        {m->segment.a, m->z_bottom}, {m->segment.b, m->z_bottom}, {m->segment.b, m->z_top}, {m->segment.a, m->z_top}};
    QuadRegion q;
    q.mirror_id = mirror_id;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto px = project_point(scene.camera, corners3d[k].first, corners3d[k].second);
        if (!px) return std::nullopt;
        q.corners[k] = *px;
    }
    return q;
}

std::vector<QuadRegion> project_all_mirrors(const geo::Scene& scene) {
    std::vector<QuadRegion> out;
    for (const auto& m : scene.mirrors) {
        auto q = project_mirror_to_image(scene, m.id);
        if (!q) continue;
        // A mirror seen exactly edge-on projects to a sliver with no area.
        try {
            validate(*q);
        } catch (const ValidationError&) {
            continue;
        }
        out.push_back(*q);
    }
    return out;
}

namespace {

std::vector<QuadRegion> from_annotation(const std::string& image_id, const AnnotationSource& src) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_directory(src.path, ec)) {
        const fs::path file = src.path / (image_id + ".json");
        if (!fs::exists(file, ec)) throw RegionSourceError("no region annotation for image " + image_id);
        return quads_from_json(parse_json(read_file(file), file.string()));
    }
    if (!fs::exists(src.path, ec)) throw RegionSourceError("annotation source not found: " + src.path.string());
    const auto j = parse_json(read_file(src.path), src.path.string());
    if (j.is_array()) return quads_from_json(j);
    if (j.is_object()) {
        if (!j.contains(image_id)) throw RegionSourceError("no region annotation for image " + image_id);
        return quads_from_json(j.at(image_id));
    }
    throw ValidationError(src.path.string() + ": expected a list or an object keyed by image id");
}

std::vector<QuadRegion> from_adapter(const std::string& image_id, const AdapterSource& src) {
    std::error_code ec;
    if (!std::filesystem::exists(src.path, ec)) {
        throw RegionSourceError("adapter region file not found: " + src.path.string());
    }
    std::istringstream in(read_file(src.path));
    std::vector<QuadRegion> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto j = parse_json(line, src.path.string() + ":" + std::to_string(lineno));
        if (!j.is_object() || !j.contains("image_id") || !j.contains("quad")) {
            throw ValidationError(src.path.string() + ":" + std::to_string(lineno) + ": needs image_id and quad");
        }
        if (j.at("image_id").get<std::string>() != image_id) continue;
        if (j.value("score", 1.0) < src.min_score) continue;
        QuadRegion q = quad_from_points(j.at("quad"));
        if (j.contains("mirror_id") && j.at("mirror_id").is_number_integer()) q.mirror_id = j.at("mirror_id").get<int>();
        validate(q);
        out.push_back(q);
    }
    return out;
}

}  // namespace

std::vector<QuadRegion> identify_regions(const std::string& image_id, const RegionSource& source) {
    return std::visit(
        [&](const auto& src) -> std::vector<QuadRegion> {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, AnnotationSource>) {
                return from_annotation(image_id, src);
            } else if constexpr (std::is_same_v<T, ProjectionSource>) {
                return project_all_mirrors(src.scene);
            } else {
                return from_adapter(image_id, src);
            }
        },
        source);
}

namespace {

std::string file_stamp(const std::filesystem::path& p) {
    std::error_code ec;
    std::string out = std::filesystem::absolute(p, ec).string();
    const auto t = std::filesystem::last_write_time(p, ec);
    if (!ec) out += "@" + std::to_string(t.time_since_epoch().count());
    if (std::filesystem::is_regular_file(p, ec)) out += "#" + std::to_string(std::filesystem::file_size(p, ec));
    return out;
}

}  // namespace

std::string cache_key(const RegionSource& source, const std::string& image_id) {
    return std::visit(
        [&](const auto& src) -> std::string {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, AnnotationSource>) {
                std::error_code ec;
                const auto file = std::filesystem::is_directory(src.path, ec) ? src.path / (image_id + ".json") : src.path;
                return "annotation:" + file_stamp(file) + ":" + image_id;
            } else if constexpr (std::is_same_v<T, ProjectionSource>) {
                return "projection:" + geo::to_json(src.scene).dump();
            } else {
                return "adapter:" + file_stamp(src.path) + ":" + std::to_string(src.min_score) + ":" + image_id;
            }
        },
        source);
}

}  // namespace ivis::mask
