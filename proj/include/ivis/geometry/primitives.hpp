#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace ivis::geo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Tolerance used for "on the boundary" decisions, in meters.
inline constexpr double kEps = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 normalized(Point2 a) {
    const double n = norm(a);
    return {a.x / n, a.y / n};
}
inline Point2 perp_ccw(Point2 a) { return {-a.y, a.x}; }
inline Point2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Segment {
    Point2 a;
    Point2 b;

    Point2 direction() const { return b - a; }
    double length() const { return distance(a, b); }
    Point2 at(double s) const { return a + (b - a) * s; }
    Point2 midpoint() const { return at(0.5); }
};

using Polygon = std::vector<Point2>;

struct Box {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    bool contains(Point2 p, double eps = kEps) const {
        return p.x >= min_x - eps && p.x <= max_x + eps && p.y >= min_y - eps &&
               p.y <= max_y + eps;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

Box bounding_box(std::span<const Point2> pts);

// Positive for counter-clockwise vertex order.
double signed_area(std::span<const Point2> poly);
inline double area(std::span<const Point2> poly) { return std::abs(signed_area(poly)); }

// Boundary-inclusive containment: points within `eps` of an edge count as inside.
bool point_in_polygon(Point2 p, std::span<const Point2> poly, double eps = kEps);

// True when `p` lies strictly inside (farther than `eps` from every edge).
bool point_strictly_inside(Point2 p, std::span<const Point2> poly, double eps = kEps);

double point_segment_distance(Point2 p, const Segment& s);

// No two non-adjacent edges touch, no adjacent edges overlap, at least 3 vertices.
bool is_simple(std::span<const Point2> poly);
bool is_convex(std::span<const Point2> poly);

// Proper or touching intersection of closed segments.
bool segments_intersect(const Segment& s, const Segment& t);

// Proper crossing: interiors cross at a single point strictly inside both.
bool segments_cross(const Segment& s, const Segment& t, double eps = kEps);

struct RayHit {
    double t = 0.0;  // distance along the (unit or not) ray direction
    double u = 0.0;  // parameter along the segment in [0, 1]
};

// Intersection of the ray origin + t * dir (t >= 0) with a closed segment.
// Parallel and collinear configurations report no hit.
std::optional<RayHit> ray_segment(Point2 origin, Point2 dir, const Segment& seg);

// Polygon edges as segments, in vertex order.
std::vector<Segment> edges_of(std::span<const Point2> poly);

// Angle wrapped into [0, 2pi).
double wrap_angle(double theta);

}  // namespace ivis::geo
