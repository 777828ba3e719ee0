#include "ivis/geometry/scene.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ivis/error.hpp"

namespace ivis::geo {

const Mirror* Scene::find_mirror(int id) const {
    for (const auto& m : mirrors) {
        if (m.id == id) return &m;
    }
    return nullptr;
}

std::vector<Segment> walls_of(const FloorPlan& plan) {
    auto walls = edges_of(plan.boundary);
    for (const auto& obstacle : plan.obstacles) {
        auto e = edges_of(obstacle);
        walls.insert(walls.end(), e.begin(), e.end());
    }
    return walls;
}

bool in_free_space(const FloorPlan& plan, Point2 p, double eps) {
    if (!point_in_polygon(p, plan.boundary, eps)) return false;
    for (const auto& obstacle : plan.obstacles) {
        if (point_strictly_inside(p, obstacle, eps)) return false;
    }
    return true;
}

bool strictly_in_free_space(const FloorPlan& plan, Point2 p, double eps) {
    if (!point_strictly_inside(p, plan.boundary, eps)) return false;
    for (const auto& obstacle : plan.obstacles) {
        if (point_in_polygon(p, obstacle, eps)) return false;
    }
    return true;
}

double free_space_area(const FloorPlan& plan) {
    double a = area(plan.boundary);
    for (const auto& o : plan.obstacles) a -= area(o);
    return a;
}

namespace {

std::string fmt_point(Point2 p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

bool polygon_finite(const Polygon& poly) {
    for (const auto& p : poly) {
        if (!is_finite(p)) return false;
    }
    return true;
}

void check_plan(const FloorPlan& plan, std::vector<std::string>& errs) {
    if (!polygon_finite(plan.boundary) || !is_simple(plan.boundary)) {
        errs.push_back("plan.boundary is not a simple polygon");
        return;
    }
    if (signed_area(plan.boundary) <= 0.0) {
        errs.push_back("plan.boundary must be counter-clockwise");
    }
    const auto boundary_edges = edges_of(plan.boundary);
    for (std::size_t i = 0; i < plan.obstacles.size(); ++i) {
        const auto& o = plan.obstacles[i];
        const std::string tag = "plan.obstacles[" + std::to_string(i) + "]";
        if (!polygon_finite(o) || !is_simple(o)) {
            errs.push_back(tag + " is not a simple polygon");
            continue;
        }
        if (signed_area(o) >= 0.0) errs.push_back(tag + " must be clockwise");
        for (const auto& v : o) {
            if (!point_strictly_inside(v, plan.boundary)) {
                errs.push_back(tag + " vertex " + fmt_point(v) + " is not strictly inside the boundary");
                break;
            }
        }
        for (const auto& e : edges_of(o)) {
            for (const auto& b : boundary_edges) {
                if (segments_intersect(e, b)) {
                    errs.push_back(tag + " touches the boundary");
                    goto next_obstacle;
                }
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& other = plan.obstacles[j];
            bool overlap = point_in_polygon(o.front(), other) || point_in_polygon(other.front(), o);
            for (const auto& e : edges_of(o)) {
                for (const auto& f : edges_of(other)) overlap = overlap || segments_intersect(e, f);
            }
            if (overlap) errs.push_back(tag + " intersects plan.obstacles[" + std::to_string(j) + "]");
        }
    next_obstacle:;
    }
}

void check_mirror(const Mirror& m, std::vector<std::string>& errs) {
    const std::string tag = "mirror " + std::to_string(m.id);
    const double len = m.segment.length();
    if (!is_finite(m.segment.a) || !is_finite(m.segment.b) || !(len > 0.0)) {
        errs.push_back(tag + ": segment must have positive length");
        return;
    }
    if (!(m.z_top > m.z_bottom)) errs.push_back(tag + ": z_top must exceed z_bottom");
    if (std::abs(norm(m.facing) - 1.0) > 1e-6) errs.push_back(tag + ": facing must be a unit vector");
    if (std::abs(dot(m.facing, m.segment.direction())) > 1e-6 * len) {
        errs.push_back(tag + ": facing must be perpendicular to the segment");
    }
    if (m.curvature.facet_count < 1) errs.push_back(tag + ": facet_count must be >= 1");
    if (m.curvature.kind == CurvatureKind::convex && !(m.curvature.radius > len / 2.0)) {
        errs.push_back(tag + ": convex radius must exceed half the segment length");
    }
}

}  // namespace

std::vector<std::string> mirror_errors(const FloorPlan& plan, const Mirror& m) {
    std::vector<std::string> errs;
    check_mirror(m, errs);
    if (!errs.empty()) return errs;
    const std::string tag = "mirror " + std::to_string(m.id);
    Point2 apex = m.segment.midpoint();
    if (m.curvature.kind == CurvatureKind::convex) {
        const double r = m.curvature.radius;
        const double half = m.segment.length() / 2.0;
        apex = apex + m.facing * (r - std::sqrt(r * r - half * half));
    }
    if (!in_free_space(plan, m.segment.a) || !in_free_space(plan, m.segment.b) || !in_free_space(plan, apex)) {
        errs.push_back(tag + ": footprint leaves free space");
        return errs;
    }
    for (const auto& w : walls_of(plan)) {
        if (segments_cross(m.segment, w)) {
            errs.push_back(tag + ": footprint crosses a wall");
            break;
        }
    }
    return errs;
}

std::vector<std::string> validation_errors(const Scene& scene) {
    std::vector<std::string> errs;
    check_plan(scene.plan, errs);
    if (!errs.empty()) return errs;

    const auto& cam = scene.camera;
    if (!is_finite(cam.position) || !strictly_in_free_space(scene.plan, cam.position)) {
        errs.push_back("camera position " + fmt_point(cam.position) + " is not in free space");
    }
    if (!(cam.fov > 0.0 && cam.fov <= kTwoPi + 1e-12)) errs.push_back("camera fov must be in (0, 2pi]");
    if (!(cam.focal > 0.0)) errs.push_back("camera focal must be positive");
    if (cam.image_w <= 0 || cam.image_h <= 0) errs.push_back("camera image size must be positive");
    if (!std::isfinite(cam.yaw) || !std::isfinite(cam.pitch) || !std::isfinite(cam.height)) {
        errs.push_back("camera angles and height must be finite");
    }

    std::set<int> mirror_ids;
    for (const auto& m : scene.mirrors) {
        if (!mirror_ids.insert(m.id).second) errs.push_back("duplicate mirror id " + std::to_string(m.id));
        for (auto& e : mirror_errors(scene.plan, m)) errs.push_back(std::move(e));
    }

    std::set<int> zone_ids;
    for (const auto& z : scene.zones) {
        const std::string tag = "zone " + std::to_string(z.id);
        if (!zone_ids.insert(z.id).second) errs.push_back("duplicate zone id " + std::to_string(z.id));
        if (!polygon_finite(z.polygon) || !is_simple(z.polygon)) {
            errs.push_back(tag + ": polygon is not simple");
            continue;
        }
        for (const auto& v : z.polygon) {
            if (!point_in_polygon(v, scene.plan.boundary)) {
                errs.push_back(tag + ": vertex " + fmt_point(v) + " lies outside the boundary");
                break;
            }
        }
    }
    for (const auto& p : scene.markers) {
        if (!is_finite(p)) errs.push_back("marker coordinates must be finite");
    }
    return errs;
}

void validate(const FloorPlan& plan) {
    std::vector<std::string> errs;
    check_plan(plan, errs);
    if (!errs.empty()) throw InvalidScene(errs.front());
}

void validate(const Mirror& mirror) {
    std::vector<std::string> errs;
    check_mirror(mirror, errs);
    if (!errs.empty()) throw InvalidGeometry(errs.front());
}

void validate(const Scene& scene) {
    const auto errs = validation_errors(scene);
    if (errs.empty()) return;
    std::string msg = errs.front();
    for (std::size_t i = 1; i < errs.size(); ++i) msg += "; " + errs[i];
    throw InvalidScene(msg);
}

Mirror make_mirror(int id, Point2 center, double facing_angle, double width, double z_bottom,
                   double z_top, Curvature curvature) {
    Mirror m;
    m.id = id;
    m.facing = unit_from_angle(facing_angle);
    const Point2 along = perp_ccw(m.facing);
    m.segment = {center - along * (width / 2.0), center + along * (width / 2.0)};
    m.z_bottom = z_bottom;
    m.z_top = z_top;
    m.curvature = curvature;
    if (curvature.kind == CurvatureKind::flat) m.curvature.facet_count = 1;
    return m;
}

}  // namespace ivis::geo
