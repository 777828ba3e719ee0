#include "ivis/geometry/reflection.hpp"

#include <algorithm>

#include "ivis/error.hpp"

namespace ivis::geo {

Point2 reflect_point(Point2 p, const Segment& line) {
    const Point2 d = line.direction();
    const double len2 = dot(d, d);
    if (!(len2 > 0.0)) throw InvalidGeometry("reflection line endpoints coincide");
    const double t = dot(p - line.a, d) / len2;
    const Point2 foot = line.a + d * t;
    return foot * 2.0 - p;
}

double aim_facing(Point2 camera, Point2 center, Point2 target) {
    const Point2 bisector = normalized(camera - center) + normalized(target - center);
    return std::atan2(bisector.y, bisector.x);
}

std::vector<Facet> facets_of(const Mirror& mirror) {
    const double facing_angle = std::atan2(mirror.facing.y, mirror.facing.x);
    if (mirror.curvature.kind == CurvatureKind::flat) {
        return {Facet{0, mirror.segment, facing_angle, facing_angle}};
    }
    const double r = mirror.curvature.radius;
    const double half = mirror.segment.length() / 2.0;
    const Point2 center = mirror.segment.midpoint() - mirror.facing * std::sqrt(r * r - half * half);
    const Point2 da = mirror.segment.a - center;
    const Point2 db = mirror.segment.b - center;
    const double phi_a = std::atan2(da.y, da.x);
    const double sweep = std::remainder(std::atan2(db.y, db.x) - phi_a, kTwoPi);
    const int n = std::max(1, mirror.curvature.facet_count);

    std::vector<Point2> pts(n + 1);
    std::vector<double> phis(n + 1);
    for (int k = 0; k <= n; ++k) {
        phis[k] = phi_a + sweep * static_cast<double>(k) / n;
        pts[k] = center + unit_from_angle(phis[k]) * r;
    }
    pts.front() = mirror.segment.a;
    pts.back() = mirror.segment.b;

    std::vector<Facet> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.push_back(Facet{k, {pts[k], pts[k + 1]}, phis[k], phis[k + 1]});
    return out;
}

namespace {

bool sees_point(const Camera& camera, const Facet& facet, double s, std::span<const Segment> walls) {
    const Point2 q = facet.point(s);
    const Point2 d = q - camera.position;
    if (dot(d, facet.normal(s)) >= 0.0) return false;
    if (!FovWedge{camera.yaw, camera.fov}.contains_angle(std::atan2(d.y, d.x))) return false;
    return segment_clear(camera.position, q, walls);
}

struct Sample {
    double s = 0.0;
    Point2 origin;
    std::optional<WallHit> hit;
};

Sample reflected_sample(const Camera& camera, const Facet& facet, double s,
                        std::span<const Segment> walls) {
    const Point2 q = facet.point(s);
    const Point2 out = reflect_direction(normalized(q - camera.position), facet.normal(s));
    return {s, q, cast_ray(q, out, walls, 1e-9)};
}

bool wall_vertex_inside(const Polygon& quad, std::span<const Segment> walls) {
    const Box box = bounding_box(quad);
    for (const auto& w : walls) {
        for (Point2 v : {w.a, w.b}) {
            if (box.contains(v) && point_strictly_inside(v, quad, 1e-9)) return true;
        }
    }
    return false;
}

// Appends hits between `a` (already emitted) and `b` (emitted by the caller),
// bisecting wherever the two rays end on different walls or a wall vertex
// sits between them.
void refine(const Camera& camera, const Facet& facet, std::span<const Segment> walls,
            const Sample& a, const Sample& b, int depth, std::vector<Sample>& out) {
    if (depth >= 48 || b.s - a.s < 1e-12) return;
    if (a.hit->wall == b.hit->wall) {
        const Polygon quad{a.origin, a.hit->point, b.hit->point, b.origin};
        if (!wall_vertex_inside(quad, walls)) return;
    }
    const Sample mid = reflected_sample(camera, facet, 0.5 * (a.s + b.s), walls);
    if (!mid.hit) return;
    refine(camera, facet, walls, a, mid, depth + 1, out);
    out.push_back(mid);
    refine(camera, facet, walls, mid, b, depth + 1, out);
}

}  // namespace

std::vector<std::pair<double, double>> visible_intervals(const Camera& camera, const Facet& facet,
                                                         std::span<const Segment> walls) {
    std::vector<double> cuts{0.0, 1.0};
    auto add_ray = [&](Point2 dir) {
        if (auto h = ray_segment(camera.position, dir, facet.chord)) cuts.push_back(h->u);
    };
    for (const auto& w : walls) {
        add_ray(w.a - camera.position);
        add_ray(w.b - camera.position);
    }
    if (!(camera.fov >= kTwoPi - 1e-12)) {
        add_ray(unit_from_angle(camera.yaw - camera.fov / 2.0));
        add_ray(unit_from_angle(camera.yaw + camera.fov / 2.0));
    }
    // Convex facets can turn their back to the camera part way along.
    auto facing = [&](double s) { return dot(facet.point(s) - camera.position, facet.normal(s)); };
    if ((facing(0.0) < 0.0) != (facing(1.0) < 0.0)) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            ((facing(mid) < 0.0) == (facing(lo) < 0.0) ? lo : hi) = mid;
        }
        cuts.push_back(0.5 * (lo + hi));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double s0 = cuts[i], s1 = cuts[i + 1];
        if (s1 - s0 < 1e-12) continue;
        if (!sees_point(camera, facet, 0.5 * (s0 + s1), walls)) continue;
        if (!out.empty() && std::abs(out.back().second - s0) < 1e-12) {
            out.back().second = s1;
        } else {
            out.emplace_back(s0, s1);
        }
    }
    return out;
}

VisRegion facet_view_region(const Camera& camera, int mirror_id, const Facet& facet,
                            std::span<const Segment> walls) {
    VisRegion region;
    region.provenance = Provenance::via(mirror_id, facet.index);
    constexpr int kInitialSamples = 8;

    for (const auto& [s0, s1] : visible_intervals(camera, facet, walls)) {
        std::vector<Sample> samples;
        for (int i = 0; i <= kInitialSamples; ++i) {
            const double s = s0 + (s1 - s0) * static_cast<double>(i) / kInitialSamples;
            auto smp = reflected_sample(camera, facet, s, walls);
            if (smp.hit) samples.push_back(smp);
        }
        if (samples.size() < 2) continue;

        std::vector<Sample> fan{samples.front()};
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            refine(camera, facet, walls, samples[i], samples[i + 1], 0, fan);
            fan.push_back(samples[i + 1]);
        }

        Polygon poly{fan.front().origin};
        for (const auto& smp : fan) {
            if (distance(poly.back(), smp.hit->point) > 1e-12) poly.push_back(smp.hit->point);
        }
        if (distance(poly.back(), fan.back().origin) > 1e-12) poly.push_back(fan.back().origin);
        if (poly.size() >= 3 && area(poly) > 0.0) region.polygons.push_back(std::move(poly));
    }
    return region;
}

std::vector<VisRegion> mirror_view_region(const Camera& camera, const Mirror& mirror,
                                          const FloorPlan& plan) {
    const auto walls = walls_of(plan);
    std::vector<VisRegion> out;
    for (const auto& facet : facets_of(mirror)) {
        auto region = facet_view_region(camera, mirror.id, facet, walls);
        if (!region.empty()) out.push_back(std::move(region));
    }
    return out;
}

}  // namespace ivis::geo
