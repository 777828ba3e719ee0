#include "ivis/synth/scene_gen.hpp"

#include <random>

#include "ivis/geometry/reflection.hpp"

namespace ivis::synth {

using geo::Point2;
using geo::Polygon;

namespace {

Polygon rect_ccw(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Polygon rect_cw(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}};
}

struct ZoneSpec {
    double x0, y0, x1, y1;
};

struct MirrorSpec {
    geo::Segment wall;  // mount stretch, inward side to its left
    double s;
    double radius;
    int zone;  // index of the target it is aimed at
    double z_bottom;
};

struct Layout {
    geo::FloorPlan plan;
    ZoneSpec targets[4];
    ZoneSpec quiet;
    MirrorSpec mirrors[4];
};

Layout t_hall() {
    Layout l;
    l.plan.boundary = {{4, 0}, {10, 0}, {10, 8}, {14, 8}, {14, 12}, {0, 12}, {0, 8}, {4, 8}};
    l.targets[0] = {4.6, 3.0, 6.2, 5.0};
    l.targets[1] = {7.8, 3.0, 9.4, 5.0};
    l.targets[2] = {0.4, 8.4, 2.2, 10.4};
    l.targets[3] = {11.8, 8.4, 13.6, 10.4};
    l.quiet = {5.5, 10.8, 8.5, 11.8};
    l.mirrors[0] = {{{10, 5}, {10, 8}}, 0.5, 2.5, 0, 1.0};
    l.mirrors[1] = {{{4, 8}, {4, 5}}, 0.5, 2.5, 1, 1.0};
    l.mirrors[2] = {{{4, 12}, {2, 12}}, 0.5, 1.5, 2, 1.9};
    l.mirrors[3] = {{{12, 12}, {10, 12}}, 0.5, 1.5, 3, 1.9};
    return l;
}

Layout l_hall() {
    Layout l;
    l.plan.boundary = {{4, 0}, {10, 0}, {10, 12}, {0, 12}, {0, 8}, {4, 8}};
    l.plan.obstacles = {rect_cw(7.9, 6.6, 9.6, 7.6)};
    l.targets[0] = {4.6, 3.0, 6.2, 5.0};
    l.targets[1] = {7.8, 3.0, 9.4, 5.0};
    l.targets[2] = {0.4, 8.4, 2.2, 10.4};
    l.targets[3] = {8.6, 9.2, 9.8, 11.0};
    l.quiet = {4.4, 11.0, 6.6, 11.8};
    l.mirrors[0] = {{{10, 4.5}, {10, 6.5}}, 0.5, 2.5, 0, 1.0};
    l.mirrors[1] = {{{4, 7.0}, {4, 5.0}}, 0.5, 2.5, 1, 1.0};
    l.mirrors[2] = {{{4, 12}, {2, 12}}, 0.5, 1.5, 2, 1.9};
    l.mirrors[3] = {{{4, 8}, {4, 7}}, 0.5, 3.0, 3, 1.0};
    return l;
}

Point2 center_of(const ZoneSpec& z) { return {(z.x0 + z.x1) / 2, (z.y0 + z.y1) / 2}; }

}  // namespace

geo::Scene synth_scene(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    Layout l = seed % 2 == 0 ? t_hall() : l_hall();
    for (auto& z : l.targets) {
        const double dx = jitter(rng), dy = jitter(rng);
        z = {z.x0 + dx, z.y0 + dy, z.x1 + dx, z.y1 + dy};
    }

    geo::Scene s;
    s.plan = l.plan;
    auto& cam = s.camera;
    cam.position = {7.0, 0.4};
    cam.yaw = geo::kPi / 2;
    cam.fov = 100.0 * geo::kPi / 180.0;
    cam.height = 2.8;
    cam.pitch = 0.12;
    cam.focal = 520.0;
    cam.image_w = 640;
    cam.image_h = 480;

    for (int k = 0; k < 4; ++k) {
        const auto& z = l.targets[k];
        s.zones.push_back({k + 1, rect_ccw(z.x0, z.y0, z.x1, z.y1), geo::ZoneKind::target});
        s.markers.push_back(center_of(z));
    }
    s.zones.push_back({5, rect_ccw(l.quiet.x0, l.quiet.y0, l.quiet.x1, l.quiet.y1), geo::ZoneKind::non_interest});

    for (int k = 0; k < 4; ++k) {
        const auto& m = l.mirrors[k];
        planner::MirrorSpec spec;
        spec.width = 1.0;
        spec.z_bottom = m.z_bottom;
        spec.z_top = m.z_bottom + 1.0;
        spec.facet_count = 8;
        const Point2 target = center_of(l.targets[m.zone]);
        const Point2 inward = geo::normalized(geo::perp_ccw(m.wall.direction()));
        const double normal_yaw = std::atan2(inward.y, inward.x);
        planner::MountSegment mount{m.wall, normal_yaw - geo::kPi / 2, normal_yaw + geo::kPi / 2};
        // Aim from the wall foot, then once more from the resulting center.
        double yaw = geo::aim_facing(cam.position, m.wall.at(m.s), target);
        for (int pass = 0; pass < 2; ++pass) {
            const auto mirror = planner::mount_mirror(k + 1, mount, m.s, yaw, m.radius, spec);
            yaw = geo::aim_facing(cam.position, mirror.segment.midpoint(), target);
        }
        s.mirrors.push_back(planner::mount_mirror(k + 1, mount, m.s, yaw, m.radius, spec));
    }
    return s;
}

geo::Scene synth_scene_direct_only(std::uint64_t seed) {
    auto s = synth_scene(seed);
    s.mirrors.clear();
    return s;
}

PlannerBenchmark planner_benchmark() {
    PlannerBenchmark b;
    auto& s = b.scene;
    s.plan.boundary = {{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}};
    s.camera.position = {9.5, 2.0};
    s.camera.yaw = geo::kPi;
    s.camera.fov = geo::kPi / 2;
    s.zones.push_back({1, rect_ccw(1.0, 0.5, 3.0, 3.0), geo::ZoneKind::target});
    s.zones.push_back({2, rect_ccw(0.5, 7.0, 3.5, 9.5), geo::ZoneKind::target});
    s.zones.push_back({3, rect_ccw(2.8, 4.2, 3.9, 5.5), geo::ZoneKind::non_interest});
    b.mounts.push_back({{{0, 0.5}, {0, 3.8}}, -1.4, 1.4});
    b.mounts.push_back({{{1, 0}, {6, 0}}, geo::kPi / 2 - 1.2, geo::kPi / 2 + 1.2});
    return b;
}

}  // namespace ivis::synth
