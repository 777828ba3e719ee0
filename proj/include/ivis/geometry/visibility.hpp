#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ivis/geometry/scene.hpp"

namespace ivis::geo {

struct Provenance {
    enum class Kind { direct, via_mirror };
    Kind kind = Kind::direct;
    int mirror_id = -1;
    int facet = -1;

    static Provenance direct() { return {}; }
    static Provenance via(int mirror_id, int facet) { return {Kind::via_mirror, mirror_id, facet}; }
};

// A set of simple polygons sharing one provenance.
struct VisRegion {
    std::vector<Polygon> polygons;
    Provenance provenance;

    bool empty() const { return polygons.empty(); }
    double area() const;
    bool contains(Point2 p, double eps = kEps) const;
};

// Field-of-view wedge centered on `yaw` with opening `angle`.
struct FovWedge {
    double yaw = 0.0;
    double angle = kTwoPi;

    bool full_circle() const { return angle >= kTwoPi - 1e-12; }
    // True when direction `theta` falls inside the wedge (inclusive).
    bool contains_angle(double theta, double tol = 1e-12) const;
};

struct WallHit {
    Point2 point;
    double t = 0.0;
    int wall = -1;
};

// First wall crossed by origin + t * dir for t > t_min.
std::optional<WallHit> cast_ray(Point2 origin, Point2 dir, std::span<const Segment> walls,
                                double t_min = 1e-12);

// True when the open segment a-b crosses no wall (touching at the ends is allowed).
bool segment_clear(Point2 a, Point2 b, std::span<const Segment> walls);

// Angular-sweep visibility polygon from `origin`, clipped to the FOV wedge.
// Throws InvalidScene when origin is not strictly inside free space.
VisRegion visibility_polygon(Point2 origin, FovWedge fov, const FloorPlan& plan,
                             std::span<const Segment> occluders = {});

// Region seen from `origin` through the segment `window`: rays leave origin,
// pass through the window and stop at the first wall beyond it. Walls between
// origin and the window are ignored, which is what a virtual camera sitting
// behind a mirror needs. The result is [window end, hits..., window end].
Polygon windowed_visibility(Point2 origin, const Segment& window, std::span<const Segment> walls);

}  // namespace ivis::geo
