#include "ivis/geometry/primitives.hpp"

#include <algorithm>
#include <limits>


namespace ivis::geo {

Box bounding_box(std::span<const Point2> pts) {
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

double signed_area(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) acc += cross(poly[j], poly[i]);
    return 0.5 * acc;
}

bool point_in_polygon(Point2 p, std::span<const Point2> poly, double eps) {
    // Same expressions as the kernels' reference path, without the SoA copy.
    const std::size_t n = poly.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double dx = poly[j].x - poly[i].x;
        const double dy = poly[j].y - poly[i].y;
        const double rx = p.x - poly[i].x;
        const double ry = p.y - poly[i].y;
        const double len2 = dx * dx + dy * dy;
        const double tol = eps * std::sqrt(len2);
        const double cr = dx * ry - dy * rx;
        const double along = dx * rx + dy * ry;
        if (cr * cr <= tol * tol && along >= -tol && along <= len2 + tol) return true;
        if (((poly[i].y > p.y) != (poly[j].y > p.y)) && p.x < dx * ry / dy + poly[i].x) inside = !inside;
    }
    return inside;
}

double point_segment_distance(Point2 p, const Segment& s) {
    const Point2 d = s.direction();
    const double len2 = dot(d, d);
    if (len2 == 0.0) return distance(p, s.a);
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return distance(p, s.at(t));
}

bool point_strictly_inside(Point2 p, std::span<const Point2> poly, double eps) {
    if (!point_in_polygon(p, poly, 0.0)) return false;
    for (const auto& e : edges_of(poly)) {
        if (point_segment_distance(p, e) <= eps) return false;
    }
    return true;
}

namespace {

int orient(Point2 a, Point2 b, Point2 c) {
    const double v = cross(b - a, c - a);
    const double scale = std::max({norm(b - a), norm(c - a), 1.0});
    if (v > 1e-12 * scale) return 1;
    if (v < -1e-12 * scale) return -1;
    return 0;
}

bool on_segment(Point2 p, const Segment& s) {
    return p.x >= std::min(s.a.x, s.b.x) - kEps && p.x <= std::max(s.a.x, s.b.x) + kEps &&
           p.y >= std::min(s.a.y, s.b.y) - kEps && p.y <= std::max(s.a.y, s.b.y) + kEps;
}

}  // namespace

bool segments_intersect(const Segment& s, const Segment& t) {
    const int o1 = orient(s.a, s.b, t.a);
    const int o2 = orient(s.a, s.b, t.b);
    const int o3 = orient(t.a, t.b, s.a);
    const int o4 = orient(t.a, t.b, s.b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(t.a, s)) return true;
    if (o2 == 0 && on_segment(t.b, s)) return true;
    if (o3 == 0 && on_segment(s.a, t)) return true;
    if (o4 == 0 && on_segment(s.b, t)) return true;
    return false;
}

bool segments_cross(const Segment& s, const Segment& t, double eps) {
    const Point2 r = s.direction();
    const Point2 q = t.direction();
    const double denom = cross(r, q);
    if (std::abs(denom) < 1e-15) return false;
    const Point2 w = t.a - s.a;
    const double u = cross(w, q) / denom;
    const double v = cross(w, r) / denom;
    const double eu = eps / std::max(norm(r), 1e-300);
    const double ev = eps / std::max(norm(q), 1e-300);
    return u > eu && u < 1.0 - eu && v > ev && v < 1.0 - ev;
}

std::optional<RayHit> ray_segment(Point2 origin, Point2 dir, const Segment& seg) {
    const Point2 e = seg.direction();
    const double denom = cross(dir, e);
    if (std::abs(denom) < 1e-15 * std::max(1.0, norm(dir) * norm(e))) return std::nullopt;
    const Point2 w = seg.a - origin;
    const double t = cross(w, e) / denom;
    const double u = cross(w, dir) / denom;
    constexpr double kSlack = 1e-12;
    if (t < 0.0 || u < -kSlack || u > 1.0 + kSlack) return std::nullopt;
    return RayHit{t, std::clamp(u, 0.0, 1.0)};
}

std::vector<Segment> edges_of(std::span<const Point2> poly) {
    std::vector<Segment> out;
    const std::size_t n = poly.size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({poly[i], poly[(i + 1) % n]});
    return out;
}

bool is_simple(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    if (area(poly) <= 0.0) return false;
    const auto es = edges_of(poly);
    for (const auto& e : es) {
        if (e.length() == 0.0) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges may only share their common vertex.
                const Segment& a = es[i];
                const Segment& b = es[j];
                const Point2 shared = (j == i + 1) ? a.b : a.a;
                const Point2 a_far = (j == i + 1) ? a.a : a.b;
                const Point2 b_far = (j == i + 1) ? b.b : b.a;
                if (orient(shared, a_far, b_far) == 0 && dot(a_far - shared, b_far - shared) > 0.0) {
                    return false;
                }
                continue;
            }
            if (segments_intersect(es[i], es[j])) return false;
        }
    }
    return true;
}

bool is_convex(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % n];
        const Point2 c = poly[(i + 2) % n];
        const double z = cross(b - a, c - b);
        if (z == 0.0) continue;
        const int s = z > 0 ? 1 : -1;
        if (sign == 0) {
            sign = s;
        } else if (s != sign) {
            return false;
        }
    }
    return sign != 0 && is_simple(poly);
}

double wrap_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

}  // namespace ivis::geo
