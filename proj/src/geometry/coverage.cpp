#include "ivis/geometry/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "ivis/error.hpp"
#include "ivis/geometry/scene_json.hpp"
#include "ivis/kernels/kernels.hpp"

namespace ivis::geo {

Point2 CoverageGrid::center(std::size_t idx) const {
    const auto ix = static_cast<double>(idx % static_cast<std::size_t>(nx));
    const auto iy = static_cast<double>(idx / static_cast<std::size_t>(nx));
    return {origin.x + (ix + 0.5) * cell_size, origin.y + (iy + 0.5) * cell_size};
}

std::optional<std::size_t> CoverageGrid::cell_of(Point2 p) const {
    const double fx = std::floor((p.x - origin.x) / cell_size);
    const double fy = std::floor((p.y - origin.y) / cell_size);
    if (fx < 0 || fy < 0 || fx >= nx || fy >= ny) return std::nullopt;
    return index(static_cast<int>(fx), static_cast<int>(fy));
}

namespace {

struct SoA {
    std::vector<double> x, y;
    explicit SoA(const Polygon& poly) {
        x.reserve(poly.size());
        y.reserve(poly.size());
        for (const auto& p : poly) {
            x.push_back(p.x);
            y.push_back(p.y);
        }
    }
    kernels::PolygonView view() const { return {x, y}; }
};

// Cell indices with centers inside `box`, restricted by `keep`.
template <typename Keep>
void candidates(const CoverageGrid& g, const Box& box, Keep keep, std::vector<std::size_t>& idx,
                std::vector<double>& xs, std::vector<double>& ys) {
    const int x0 = std::max(0, static_cast<int>(std::floor((box.min_x - g.origin.x) / g.cell_size - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor((box.min_y - g.origin.y) / g.cell_size - 0.5)));
    const int x1 = std::min(g.nx - 1, static_cast<int>(std::ceil((box.max_x - g.origin.x) / g.cell_size)));
    const int y1 = std::min(g.ny - 1, static_cast<int>(std::ceil((box.max_y - g.origin.y) / g.cell_size)));
    for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (!keep(i)) continue;
            const Point2 c = g.center(i);
            if (!box.contains(c)) continue;
            idx.push_back(i);
            xs.push_back(c.x);
            ys.push_back(c.y);
        }
    }
}

template <typename Keep>
std::vector<std::size_t> cells_in(const CoverageGrid& g, const Polygon& poly, Keep keep) {
    std::vector<std::size_t> idx;
    std::vector<double> xs, ys;
    candidates(g, bounding_box(poly), keep, idx, xs, ys);
    std::vector<std::uint8_t> hit(idx.size());
    const SoA soa(poly);
    kernels::points_in_polygon(xs, ys, soa.view(), kEps, hit);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (hit[k]) out.push_back(idx[k]);
    }
    return out;
}

}  // namespace

CoverageGrid make_grid(const FloorPlan& plan, double cell_size) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw InvalidArgument("cell_size must be positive");
    }
    const Box box = bounding_box(plan.boundary);
    if (cell_size > std::min(box.width(), box.height())) {
        throw InvalidArgument("cell_size exceeds the scene extent");
    }
    CoverageGrid g;
    g.cell_size = cell_size;
    g.origin = {box.min_x, box.min_y};
    g.nx = static_cast<int>(std::ceil(box.width() / cell_size - 1e-9));
    g.ny = static_cast<int>(std::ceil(box.height() / cell_size - 1e-9));
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    g.free.assign(n, 0);
    g.direct.assign(n, 0);
    g.via.assign(n, {});

    std::vector<std::size_t> idx;
    std::vector<double> xs, ys;
    candidates(g, box, [](std::size_t) { return true; }, idx, xs, ys);
    std::vector<std::uint8_t> inside(idx.size());
    kernels::points_in_polygon(xs, ys, SoA(plan.boundary).view(), kEps, inside);
    for (std::size_t k = 0; k < idx.size(); ++k) g.free[idx[k]] = inside[k];

    for (const auto& obstacle : plan.obstacles) {
        for (std::size_t i : cells_in(g, obstacle, [&](std::size_t c) { return g.free[c] != 0; })) {
            if (point_strictly_inside(g.center(i), obstacle)) g.free[i] = 0;
        }
    }
    return g;
}

std::vector<std::size_t> cells_in_polygon(const CoverageGrid& grid, const Polygon& poly) {
    return cells_in(grid, poly, [&](std::size_t c) { return grid.free[c] != 0; });
}

std::vector<std::size_t> cells_in_region(const CoverageGrid& grid, const VisRegion& region) {
    std::vector<std::size_t> out;
    for (const auto& poly : region.polygons) {
        auto part = cells_in_polygon(grid, poly);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> mirror_cells(const CoverageGrid& grid, const Camera& camera,
                                      const Mirror& mirror, const FloorPlan& plan) {
    std::vector<std::size_t> cells;
    for (const auto& region : mirror_view_region(camera, mirror, plan)) {
        auto part = cells_in_region(grid, region);
        cells.insert(cells.end(), part.begin(), part.end());
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

CoverageGrid coverage_map(const Scene& scene, double cell_size) {
    CoverageGrid g = make_grid(scene.plan, cell_size);
    const auto& cam = scene.camera;
    const auto direct = visibility_polygon(cam.position, {cam.yaw, cam.fov}, scene.plan);
    for (std::size_t i : cells_in_region(g, direct)) g.direct[i] = 1;

    std::vector<const Mirror*> order;
    for (const auto& m : scene.mirrors) order.push_back(&m);
    std::sort(order.begin(), order.end(), [](const Mirror* a, const Mirror* b) { return a->id < b->id; });
    for (const Mirror* m : order) {
        for (std::size_t i : mirror_cells(g, cam, *m, scene.plan)) g.via[i].push_back(m->id);
    }
    return g;
}

std::vector<bool> marker_coverage(const Scene& scene, const CoverageGrid& grid) {
    std::vector<bool> out;
    for (const auto& p : scene.markers) {
        const auto cell = grid.cell_of(p);
        out.push_back(cell && grid.covered(*cell));
    }
    return out;
}

std::vector<std::uint8_t> zone_membership(const Scene& scene, const CoverageGrid& grid, ZoneKind kind) {
    std::vector<std::uint8_t> in(grid.size(), 0);
    for (const auto& z : scene.zones) {
        if (z.kind != kind) continue;
        for (std::size_t i : cells_in_polygon(grid, z.polygon)) in[i] = 1;
    }
    return in;
}

std::vector<MirrorAlignment> alignment_report(const Scene& scene, const CoverageGrid& grid) {
    const auto target = zone_membership(scene, grid, ZoneKind::target);
    const auto quiet = zone_membership(scene, grid, ZoneKind::non_interest);
    std::vector<MirrorAlignment> out;
    for (const auto& m : scene.mirrors) {
        MirrorAlignment a;
        a.mirror_id = m.id;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::binary_search(grid.via[i].begin(), grid.via[i].end(), m.id)) continue;
            a.target_cells_covered += target[i];
            a.leakage_cells += quiet[i];
        }
        a.aligned = a.leakage_cells == 0;
        out.push_back(a);
    }
    return out;
}

CoverageSummary summarize(const Scene& scene, const CoverageGrid& grid) {
    CoverageSummary s;
    const auto target = zone_membership(scene, grid, ZoneKind::target);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.free[i]) continue;
        ++s.free_cells;
        if (grid.direct[i]) {
            ++s.direct_cells;
        } else if (!grid.via[i].empty()) {
            ++s.indirect_only_cells;
        } else {
            ++s.uncovered_cells;
        }
        if (target[i]) {
            ++s.target_cells;
            s.target_cells_covered += grid.covered(i);
        }
    }
    const auto markers = marker_coverage(scene, grid);
    s.markers_total = markers.size();
    s.markers_covered = static_cast<std::size_t>(std::count(markers.begin(), markers.end(), true));
    return s;
}

nlohmann::json to_json(const CoverageGrid& grid, const Scene& scene) {
    using nlohmann::json;
    // Row strings, bottom row first: '#' outside free space, '.' uncovered,
    // 'D' direct only, 'I' via mirrors only, 'B' both.
    json rows = json::array();
    json indirect = json::object();
    for (int iy = 0; iy < grid.ny; ++iy) {
        std::string row(static_cast<std::size_t>(grid.nx), '#');
        for (int ix = 0; ix < grid.nx; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            if (!grid.free[i]) continue;
            const bool d = grid.direct[i] != 0;
            const bool v = !grid.via[i].empty();
            row[static_cast<std::size_t>(ix)] = d && v ? 'B' : d ? 'D' : v ? 'I' : '.';
            for (int id : grid.via[i]) indirect[std::to_string(id)].push_back(i);
        }
        rows.push_back(row);
    }
    const auto s = summarize(scene, grid);
    const auto markers = marker_coverage(scene, grid);
    json marker_list = json::array();
    for (std::size_t k = 0; k < markers.size(); ++k) {
        marker_list.push_back({{"position", to_json(scene.markers[k])}, {"covered", static_cast<bool>(markers[k])}});
    }
    return {{"cell_size", grid.cell_size},
            {"origin", to_json(grid.origin)},
            {"nx", grid.nx},
            {"ny", grid.ny},
            {"rows", rows},
            {"indirect_cells", indirect},
            {"markers", marker_list},
            {"summary",
             {{"free_cells", s.free_cells},
              {"direct_cells", s.direct_cells},
              {"indirect_only_cells", s.indirect_only_cells},
              {"uncovered_cells", s.uncovered_cells},
              {"target_cells", s.target_cells},
              {"target_cells_covered", s.target_cells_covered},
              {"markers_total", s.markers_total},
              {"markers_covered", s.markers_covered}}}};
}

nlohmann::json to_json(const std::vector<MirrorAlignment>& report) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& a : report) {
        out.push_back({{"mirror_id", a.mirror_id},
                       {"target_cells_covered", a.target_cells_covered},
                       {"leakage_cells", a.leakage_cells},
                       {"aligned", a.aligned}});
    }
    return out;
}

}  // namespace ivis::geo
