#include "ivis/geometry/scene_json.hpp"

#include <fstream>
#include <sstream>

#include "ivis/error.hpp"

namespace ivis::geo {

using nlohmann::json;

json to_json(Point2 p) { return json::array({p.x, p.y}); }

json to_json(const Polygon& poly) {
    json out = json::array();
    for (const auto& p : poly) out.push_back(to_json(p));
    return out;
}

json to_json(const Mirror& m) {
    json curv;
    if (m.curvature.kind == CurvatureKind::flat) {
        curv = {{"kind", "flat"}};
    } else {
        curv = {{"kind", "convex"}, {"radius", m.curvature.radius},
                {"facet_count", m.curvature.facet_count}};
    }
    return {{"id", m.id},
            {"segment", json::array({to_json(m.segment.a), to_json(m.segment.b)})},
            {"facing", to_json(m.facing)},
            {"z_bottom", m.z_bottom},
            {"z_top", m.z_top},
            {"curvature", curv}};
}

json to_json(const Scene& scene) {
    json obstacles = json::array();
    for (const auto& o : scene.plan.obstacles) obstacles.push_back(to_json(o));
    const auto& c = scene.camera;
    json mirrors = json::array();
    for (const auto& m : scene.mirrors) mirrors.push_back(to_json(m));
    json zones = json::array();
    for (const auto& z : scene.zones) {
        zones.push_back({{"id", z.id},
                         {"kind", z.kind == ZoneKind::target ? "target" : "non_interest"},
                         {"polygon", to_json(z.polygon)}});
    }
    json out = {{"plan", {{"boundary", to_json(scene.plan.boundary)}, {"obstacles", obstacles}}},
                {"camera",
                 {{"position", to_json(c.position)},
                  {"yaw", c.yaw},
                  {"fov", c.fov},
                  {"height", c.height},
                  {"pitch", c.pitch},
                  {"focal", c.focal},
                  {"image_w", c.image_w},
                  {"image_h", c.image_h}}},
                {"mirrors", mirrors},
                {"zones", zones}};
    if (!scene.markers.empty()) out["markers"] = to_json(scene.markers);
    return out;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
    throw ValidationError("scene schema: " + what);
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing key '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number()) schema_error(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_integer()) schema_error(std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

}  // namespace

Point2 point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        schema_error("point must be [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Polygon polygon_from_json(const json& j) {
    if (!j.is_array()) schema_error("polygon must be a list of points");
    Polygon out;
    for (const auto& p : j) out.push_back(point_from_json(p));
    return out;
}

Mirror mirror_from_json(const json& j) {
    Mirror m;
    m.id = integer(j, "id");
    const auto& seg = field(j, "segment");
    if (!seg.is_array() || seg.size() != 2) schema_error("mirror segment must hold two points");
    m.segment = {point_from_json(seg[0]), point_from_json(seg[1])};
    m.facing = point_from_json(field(j, "facing"));
    m.z_bottom = number(j, "z_bottom");
    m.z_top = number(j, "z_top");
    if (j.contains("curvature")) {
        const auto& c = j.at("curvature");
        const auto kind = field(c, "kind");
        if (kind == "flat") {
            m.curvature = {CurvatureKind::flat, 0.0, 1};
        } else if (kind == "convex") {
            m.curvature = {CurvatureKind::convex, number(c, "radius"),
                           c.contains("facet_count") ? integer(c, "facet_count") : 8};
        } else {
            schema_error("curvature kind must be 'flat' or 'convex'");
        }
    }
    return m;
}

Scene scene_from_json(const json& j) {
    Scene s;
    const auto& plan = field(j, "plan");
    s.plan.boundary = polygon_from_json(field(plan, "boundary"));
    if (plan.contains("obstacles")) {
        for (const auto& o : plan.at("obstacles")) s.plan.obstacles.push_back(polygon_from_json(o));
    }
    const auto& cam = field(j, "camera");
    s.camera.position = point_from_json(field(cam, "position"));
    if (cam.contains("yaw")) s.camera.yaw = number(cam, "yaw");
    if (cam.contains("fov")) s.camera.fov = number(cam, "fov");
    if (cam.contains("height")) s.camera.height = number(cam, "height");
    if (cam.contains("pitch")) s.camera.pitch = number(cam, "pitch");
    if (cam.contains("focal")) s.camera.focal = number(cam, "focal");
    if (cam.contains("image_w")) s.camera.image_w = integer(cam, "image_w");
    if (cam.contains("image_h")) s.camera.image_h = integer(cam, "image_h");
    if (j.contains("mirrors")) {
        for (const auto& m : j.at("mirrors")) s.mirrors.push_back(mirror_from_json(m));
    }
    if (j.contains("zones")) {
        for (const auto& z : j.at("zones")) {
            Zone zone;
            zone.id = integer(z, "id");
            const auto& kind = field(z, "kind");
            if (kind == "target") {
                zone.kind = ZoneKind::target;
            } else if (kind == "non_interest") {
                zone.kind = ZoneKind::non_interest;
            } else {
                schema_error("zone kind must be 'target' or 'non_interest'");
            }
            zone.polygon = polygon_from_json(field(z, "polygon"));
            s.zones.push_back(std::move(zone));
        }
    }
    if (j.contains("markers")) s.markers = polygon_from_json(j.at("markers"));
    validate(s);
    return s;
}

Scene parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scene is not valid JSON: ") + e.what());
    }
    return scene_from_json(j);
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scene file " + path.string());
    out << to_json(scene).dump(2) << "\n";
}

}  // namespace ivis::geo
