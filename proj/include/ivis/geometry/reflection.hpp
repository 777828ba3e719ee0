#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ivis/geometry/visibility.hpp"

namespace ivis::geo {

// Mirror image of `p` across the infinite line through `line`.
// Throws InvalidGeometry when the line endpoints coincide.
Point2 reflect_point(Point2 p, const Segment& line);

// Reflection of direction `d` off a surface with unit normal `n`.
inline Point2 reflect_direction(Point2 d, Point2 n) { return d - n * (2.0 * dot(d, n)); }

// One planar piece of a mirror. For convex mirrors the facet is a chord of the
// arc, and the surface normal at chord parameter s is the arc normal at the
// matching arc angle (interpolated between normal_angle0 and normal_angle1),
// so adjacent facets produce a continuous reflected fan. Flat mirrors have a
// single facet with a constant normal.
struct Facet {
    int index = 0;
    Segment chord;
    double normal_angle0 = 0.0;
    double normal_angle1 = 0.0;

    Point2 point(double s) const { return chord.at(s); }
    Point2 normal(double s) const {
        return unit_from_angle(normal_angle0 + (normal_angle1 - normal_angle0) * s);
    }
    bool is_flat() const { return normal_angle0 == normal_angle1; }
};

std::vector<Facet> facets_of(const Mirror& mirror);

// Facing angle that makes a flat mirror at `center` reflect the sight line
// from `camera` toward `target` (the bisector of the two directions).
double aim_facing(Point2 camera, Point2 center, Point2 target);

// Sub-intervals [s0, s1] of the facet chord that the camera sees directly:
// inside its FOV, unobstructed, and hitting the reflecting face.
std::vector<std::pair<double, double>> visible_intervals(const Camera& camera, const Facet& facet,
                                                         std::span<const Segment> walls);

// Everything the camera sees via one facet. One polygon per visible interval,
// each bounded by the facet chord and the first walls hit by reflected rays.
VisRegion facet_view_region(const Camera& camera, int mirror_id, const Facet& facet,
                            std::span<const Segment> walls);

// Union over facets of the mirror; empty when the mirror is not visible.
std::vector<VisRegion> mirror_view_region(const Camera& camera, const Mirror& mirror,
                                          const FloorPlan& plan);

}  // namespace ivis::geo
