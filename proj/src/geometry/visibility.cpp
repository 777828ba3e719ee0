#include "ivis/geometry/visibility.hpp"

#include <algorithm>

#include "ivis/error.hpp"

namespace ivis::geo {

namespace {

// Angular offset of the rays cast either side of each wall vertex. Small
// enough that the displacement at room scale stays far below a millimeter.
constexpr double kSideAngle = 1e-9;

void push_unique(Polygon& poly, Point2 p) {
    if (!poly.empty() && distance(poly.back(), p) < 1e-12) return;
    poly.push_back(p);
}

std::vector<double> critical_offsets(Point2 origin, double start, double span,
                                     std::span<const Segment> walls, bool full) {
    std::vector<double> rel;
    rel.reserve(walls.size() * 6 + 2);
    auto consider = [&](Point2 v) {
        const Point2 d = v - origin;
        if (norm(d) < 1e-12) return;
        const double base = wrap_angle(std::atan2(d.y, d.x) - start);
        for (double off : {-kSideAngle, 0.0, kSideAngle}) {
            double r = base + off;
            if (full) {
                rel.push_back(wrap_angle(r));
            } else if (r >= 0.0 && r <= span) {
                rel.push_back(r);
            }
        }
    };
    for (const auto& w : walls) {
        consider(w.a);
        consider(w.b);
    }
    if (!full) {
        rel.push_back(0.0);
        rel.push_back(span);
    }
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    return rel;
}

}  // namespace

double VisRegion::area() const {
    double a = 0.0;
    for (const auto& p : polygons) a += geo::area(p);
    return a;
}

bool VisRegion::contains(Point2 p, double eps) const {
    for (const auto& poly : polygons) {
        if (point_in_polygon(p, poly, eps)) return true;
    }
    return false;
}

bool FovWedge::contains_angle(double theta, double tol) const {
    if (full_circle()) return true;
    const double rel = wrap_angle(theta - (yaw - angle / 2.0));
    return rel <= angle + tol || rel >= kTwoPi - tol;
}

std::optional<WallHit> cast_ray(Point2 origin, Point2 dir, std::span<const Segment> walls,
                                double t_min) {
    std::optional<WallHit> best;
    for (std::size_t i = 0; i < walls.size(); ++i) {
        const auto h = ray_segment(origin, dir, walls[i]);
        if (!h || h->t <= t_min) continue;
        if (!best || h->t < best->t) best = WallHit{origin + dir * h->t, h->t, static_cast<int>(i)};
    }
    return best;
}

bool segment_clear(Point2 a, Point2 b, std::span<const Segment> walls) {
    const Segment s{a, b};
    const Point2 dir = b - a;
    const double tol = kEps * std::max(norm(dir), 1.0);
    // Wall vertices touching the interior of the sight line block it only when
    // the walls meeting there continue to both sides of the line.
    std::vector<std::pair<Point2, int>> touches;
    for (const auto& w : walls) {
        if (segments_cross(s, w)) return false;
        for (int end = 0; end < 2; ++end) {
            const Point2 v = end == 0 ? w.a : w.b;
            const Point2 other = end == 0 ? w.b : w.a;
            if (point_segment_distance(v, s) >= kEps || distance(v, a) <= kEps || distance(v, b) <= kEps) {
                continue;
            }
            const double side = cross(dir, other - a);
            touches.push_back({v, side > tol ? 1 : (side < -tol ? -1 : 0)});
        }
    }
    for (std::size_t i = 0; i < touches.size(); ++i) {
        for (std::size_t j = i + 1; j < touches.size(); ++j) {
            if (distance(touches[i].first, touches[j].first) < kEps &&
                touches[i].second * touches[j].second < 0) {
                return false;
            }
        }
    }
    return true;
}

VisRegion visibility_polygon(Point2 origin, FovWedge fov, const FloorPlan& plan,
                             std::span<const Segment> occluders) {
    if (!strictly_in_free_space(plan, origin)) {
        throw InvalidScene("visibility origin is not inside free space");
    }
    auto walls = walls_of(plan);
    walls.insert(walls.end(), occluders.begin(), occluders.end());

    const bool full = fov.full_circle();
    const double start = full ? 0.0 : fov.yaw - fov.angle / 2.0;
    const auto rel = critical_offsets(origin, start, fov.angle, walls, full);

    Polygon poly;
    if (!full) poly.push_back(origin);
    for (double r : rel) {
        const auto hit = cast_ray(origin, unit_from_angle(start + r), walls);
        if (hit) push_unique(poly, hit->point);
    }
    if (poly.size() > 1 && distance(poly.front(), poly.back()) < 1e-12) poly.pop_back();

    VisRegion out;
    out.provenance = Provenance::direct();
    if (poly.size() >= 3) out.polygons.push_back(std::move(poly));
    return out;
}

Polygon windowed_visibility(Point2 origin, const Segment& window, std::span<const Segment> walls) {
    Point2 first = window.a;
    Point2 last = window.b;
    double start = std::atan2(first.y - origin.y, first.x - origin.x);
    double span = wrap_angle(std::atan2(last.y - origin.y, last.x - origin.x) - start);
    if (span > kPi) {
        std::swap(first, last);
        start = std::atan2(first.y - origin.y, first.x - origin.x);
        span = kTwoPi - span;
    }
    const Point2 e = last - first;

    auto rel = critical_offsets(origin, start, span, walls, false);
    Polygon poly;
    poly.push_back(first);
    for (double r : rel) {
        const Point2 d = unit_from_angle(start + r);
        const double denom = cross(d, e);
        if (std::abs(denom) < 1e-15) continue;
        const double t_window = cross(first - origin, e) / denom;
        const auto hit = cast_ray(origin, d, walls, t_window + 1e-9);
        if (hit) push_unique(poly, hit->point);
    }
    push_unique(poly, last);
    return poly;
}

}  // namespace ivis::geo
