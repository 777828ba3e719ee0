#pragma once

// Brute-force reference computations used only by tests. Nothing here calls
// the sweep/fan code under test: visibility is recovered by casting a dense,
// uniform set of camera rays and marching them to the first wall, and mirror
// views by reflecting those same rays off the exact mirror surface (the true
// circular arc for convex mirrors).

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "ivis/geometry/scene.hpp"

namespace oracle {

using ivis::geo::Point2;
using ivis::geo::Segment;

inline double cross2(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

// Nearest crossing of origin + t*dir with any segment, t > t_min.
inline std::optional<double> march(Point2 o, Point2 dir, const std::vector<Segment>& walls,
                                   double t_min = 1e-9) {
    std::optional<double> best;
    for (const auto& w : walls) {
        const Point2 e = w.b - w.a;
        const double den = cross2(dir, e);
        if (std::abs(den) < 1e-14) continue;
        const Point2 q = w.a - o;
        const double t = cross2(q, e) / den;
        const double u = cross2(q, dir) / den;
        if (t > t_min && u >= -1e-12 && u <= 1 + 1e-12 && (!best || t < *best)) best = t;
    }
    return best;
}

struct DirectRays {
    Point2 origin;
    double start = 0.0;
    double span = 0.0;
    std::vector<double> range;  // hit distance per ray

    double step() const { return span / static_cast<double>(range.size()); }

    double area() const {
        double a = 0.0;
        for (double r : range) a += 0.5 * r * r * step();
        return a;
    }

    bool contains(Point2 p) const {
        const Point2 d = p - origin;
        const double dist = std::hypot(d.x, d.y);
        if (dist < 1e-12) return true;
        double rel = std::fmod(std::atan2(d.y, d.x) - start, 2 * M_PI);
        if (rel < 0) rel += 2 * M_PI;
        if (rel > span) return false;
        auto k = static_cast<std::size_t>(rel / step());
        k = std::min(k, range.size() - 1);
        return dist <= range[k];
    }
};

inline DirectRays cast_direct(Point2 origin, double yaw, double fov, const std::vector<Segment>& walls,
                              std::size_t n_rays = 100000) {
    DirectRays out;
    out.origin = origin;
    const bool full = fov >= 2 * M_PI - 1e-12;
    out.start = full ? 0.0 : yaw - fov / 2;
    out.span = full ? 2 * M_PI : fov;
    out.range.resize(n_rays);
    for (std::size_t k = 0; k < n_rays; ++k) {
        const double th = out.start + (static_cast<double>(k) + 0.5) * out.span / n_rays;
        out.range[k] = march(origin, {std::cos(th), std::sin(th)}, walls).value_or(0.0);
    }
    return out;
}

// Exact mirror surface: a segment (flat) or a circular arc (convex).
struct Surface {
    bool convex = false;
    Segment chord;
    Point2 facing;
    Point2 center;
    double radius = 0.0;
    double phi_a = 0.0, sweep = 0.0;

    static Surface of(const ivis::geo::Mirror& m) {
        Surface s;
        s.chord = m.segment;
        s.facing = m.facing;
        if (m.curvature.kind == ivis::geo::CurvatureKind::convex) {
            s.convex = true;
            s.radius = m.curvature.radius;
            const double half = std::hypot(m.segment.b.x - m.segment.a.x, m.segment.b.y - m.segment.a.y) / 2;
            const Point2 mid = m.segment.midpoint();
            const double h = std::sqrt(s.radius * s.radius - half * half);
            s.center = {mid.x - m.facing.x * h, mid.y - m.facing.y * h};
            s.phi_a = std::atan2(m.segment.a.y - s.center.y, m.segment.a.x - s.center.x);
            const double phi_b = std::atan2(m.segment.b.y - s.center.y, m.segment.b.x - s.center.x);
            s.sweep = std::remainder(phi_b - s.phi_a, 2 * M_PI);
        }
        return s;
    }

    // Front-face hit: distance and surface normal.
    std::optional<std::pair<double, Point2>> hit(Point2 o, Point2 d) const {
        if (!convex) {
            const Point2 e = chord.b - chord.a;
            const double den = cross2(d, e);
            if (std::abs(den) < 1e-14) return std::nullopt;
            const Point2 q = chord.a - o;
            const double t = cross2(q, e) / den;
            const double u = cross2(q, d) / den;
            if (t <= 1e-9 || u < 0 || u > 1) return std::nullopt;
            if (d.x * facing.x + d.y * facing.y >= 0) return std::nullopt;
            return std::make_pair(t, facing);
        }
        const Point2 oc{o.x - center.x, o.y - center.y};
        const double b = oc.x * d.x + oc.y * d.y;
        const double c = oc.x * oc.x + oc.y * oc.y - radius * radius;
        const double disc = b * b - c;
        if (disc < 0) return std::nullopt;
        for (double t : {-b - std::sqrt(disc), -b + std::sqrt(disc)}) {
            if (t <= 1e-9) continue;
            const Point2 p{o.x + t * d.x, o.y + t * d.y};
            const double phi = std::atan2(p.y - center.y, p.x - center.x);
            const double rel = std::remainder(phi - phi_a, 2 * M_PI);
            const bool on_arc = sweep >= 0 ? (rel >= 0 && rel <= sweep) : (rel <= 0 && rel >= sweep);
            if (!on_arc) continue;
            const Point2 n{(p.x - center.x) / radius, (p.y - center.y) / radius};
            if (d.x * n.x + d.y * n.y >= 0) return std::nullopt;
            return std::make_pair(t, n);
        }
        return std::nullopt;
    }
};

// Reflected ray bundle of one mirror: consecutive camera rays that strike the
// mirror form thin quads [m_i, h_i, h_i+1, m_i+1].
struct ReflectedRays {
    struct Ray {
        Point2 m, h, dir;
    };
    std::vector<std::vector<Ray>> runs;

    static double quad_area(const Ray& a, const Ray& b) {
        const Point2 q[4] = {a.m, a.h, b.h, b.m};
        double s = 0;
        for (int i = 0; i < 4; ++i) s += cross2(q[i], q[(i + 1) % 4]);
        return std::abs(s) / 2;
    }

    double area() const {
        double a = 0;
        for (const auto& run : runs) {
            for (std::size_t i = 0; i + 1 < run.size(); ++i) a += quad_area(run[i], run[i + 1]);
        }
        return a;
    }

    static bool in_quad(Point2 p, const Ray& a, const Ray& b) {
        const Point2 q[4] = {a.m, a.h, b.h, b.m};
        int pos = 0, neg = 0;
        for (int i = 0; i < 4; ++i) {
            const Point2 e{q[(i + 1) % 4].x - q[i].x, q[(i + 1) % 4].y - q[i].y};
            const double c = cross2(e, {p.x - q[i].x, p.y - q[i].y});
            if (c > 1e-12) ++pos;
            if (c < -1e-12) ++neg;
        }
        return pos == 0 || neg == 0;
    }

    bool contains(Point2 p) const {
        for (const auto& run : runs) {
            if (run.size() < 2) continue;
            auto side = [&](std::size_t i) { return cross2(run[i].dir, {p.x - run[i].m.x, p.y - run[i].m.y}); };
            std::size_t lo = 0, hi = run.size() - 1;
            const double s_lo = side(lo), s_hi = side(hi);
            if ((s_lo > 0) == (s_hi > 0)) continue;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                ((side(mid) > 0) == (s_lo > 0) ? lo : hi) = mid;
            }
            if (in_quad(p, run[lo], run[hi])) return true;
        }
        return false;
    }
};

inline ReflectedRays cast_reflected(const ivis::geo::Camera& cam, const ivis::geo::Mirror& mirror,
                                    const std::vector<Segment>& walls, std::size_t n_rays = 100000) {
    const Surface surf = Surface::of(mirror);
    ReflectedRays out;
    const bool full = cam.fov >= 2 * M_PI - 1e-12;
    const double start = full ? 0.0 : cam.yaw - cam.fov / 2;
    const double span = full ? 2 * M_PI : cam.fov;
    std::vector<ReflectedRays::Ray> run;
    auto flush = [&] {
        if (run.size() >= 2) out.runs.push_back(run);
        run.clear();
    };
    for (std::size_t k = 0; k < n_rays; ++k) {
        const double th = start + (static_cast<double>(k) + 0.5) * span / n_rays;
        const Point2 d{std::cos(th), std::sin(th)};
        const auto mh = surf.hit(cam.position, d);
        if (!mh) {
            flush();
            continue;
        }
        const auto wall_t = march(cam.position, d, walls);
        if (wall_t && *wall_t < mh->first - 1e-9) {
            flush();
            continue;
        }
        const Point2 m{cam.position.x + d.x * mh->first, cam.position.y + d.y * mh->first};
        const Point2 n = mh->second;
        const double dn = d.x * n.x + d.y * n.y;
        const Point2 r{d.x - 2 * dn * n.x, d.y - 2 * dn * n.y};
        const auto t = march(m, r, walls);
        if (!t) {
            flush();
            continue;
        }
        run.push_back({m, {m.x + r.x * *t, m.y + r.y * *t}, r});
    }
    flush();
    return out;
}

// Uniform samples over free space by rejection from the bounding box.
inline std::vector<Point2> sample_free_space(const ivis::geo::FloorPlan& plan, std::size_t count,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& p : plan.boundary) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::vector<Point2> out;
    while (out.size() < count) {
        const Point2 p{ux(rng), uy(rng)};
        if (ivis::geo::strictly_in_free_space(plan, p)) out.push_back(p);
    }
    return out;
}

}  // namespace oracle
