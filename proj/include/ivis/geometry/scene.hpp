#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ivis/geometry/primitives.hpp"

namespace ivis::geo {

// Floor plan: counter-clockwise outer boundary, clockwise obstacles strictly
// inside it. Obstacle boundaries belong to free space.
struct FloorPlan {
    Polygon boundary;
    std::vector<Polygon> obstacles;
};

struct Camera {
    Point2 position;
    double yaw = 0.0;     // optical axis heading in the floor plane, CCW from +x
    double fov = kTwoPi;  // horizontal opening angle in (0, 2pi]
    double height = 2.5;  // meters above the floor
    double pitch = 0.0;   // downward tilt of the optical axis
    double focal = 500.0;  // pixels
    int image_w = 640;
    int image_h = 480;

    bool full_circle() const { return fov >= kTwoPi - 1e-12; }
};

enum class CurvatureKind { flat, convex };

struct Curvature {
    CurvatureKind kind = CurvatureKind::flat;
    double radius = 0.0;  // convex only
    int facet_count = 1;
};

struct Mirror {
    int id = 0;
    Segment segment;  // footprint chord
    Point2 facing;    // unit normal of the reflecting side
    double z_bottom = 1.0;
    double z_top = 1.6;
    Curvature curvature;
};

enum class ZoneKind { target, non_interest };

struct Zone {
    int id = 0;
    Polygon polygon;
    ZoneKind kind = ZoneKind::target;
};

struct Scene {
    FloorPlan plan;
    Camera camera;
    std::vector<Mirror> mirrors;
    std::vector<Zone> zones;
    // Optional point markers (e.g. monitored objects) reported by coverage.
    std::vector<Point2> markers;

    const Mirror* find_mirror(int id) const;
};

// All wall segments: boundary edges followed by obstacle edges.
std::vector<Segment> walls_of(const FloorPlan& plan);

// Inside the boundary (inclusive) and not strictly inside any obstacle.
bool in_free_space(const FloorPlan& plan, Point2 p, double eps = kEps);

// Strictly interior to free space: not within eps of any wall.
bool strictly_in_free_space(const FloorPlan& plan, Point2 p, double eps = kEps);

double free_space_area(const FloorPlan& plan);

// Throws InvalidScene describing the first violated invariant.
void validate(const FloorPlan& plan);
void validate(const Mirror& mirror);
void validate(const Scene& scene);

// Problems with one mirror's shape and its footprint in the plan.
std::vector<std::string> mirror_errors(const FloorPlan& plan, const Mirror& mirror);

// Every problem found, empty when valid.
std::vector<std::string> validation_errors(const Scene& scene);

// Mirror with the given center, facing angle and chord width. The chord is
// perpendicular to the facing direction.
Mirror make_mirror(int id, Point2 center, double facing_angle, double width, double z_bottom,
                   double z_top, Curvature curvature);

}  // namespace ivis::geo
