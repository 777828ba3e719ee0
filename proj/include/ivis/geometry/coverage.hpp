#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ivis/geometry/reflection.hpp"

namespace ivis::geo {

inline constexpr double kDefaultCellSize = 0.1;

// Square cells over the boundary's bounding box. Only cells whose centers lie
// in free space carry labels; the rest are outside the grid's domain.
struct CoverageGrid {
    double cell_size = kDefaultCellSize;
    Point2 origin;
    int nx = 0;
    int ny = 0;
    std::vector<std::uint8_t> free;    // center in free space
    std::vector<std::uint8_t> direct;  // center seen directly
    std::vector<std::vector<int>> via;  // ids of mirrors whose view contains the center, ascending

    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }
    Point2 center(std::size_t idx) const;
    std::optional<std::size_t> cell_of(Point2 p) const;
    bool covered(std::size_t idx) const { return free[idx] && (direct[idx] || !via[idx].empty()); }
    std::size_t size() const { return free.size(); }
};

// Empty grid with the domain (free flags) filled in. Throws InvalidArgument
// for non-positive cell sizes or cells larger than the plan's smaller extent.
CoverageGrid make_grid(const FloorPlan& plan, double cell_size);

// Indices of free cells whose centers lie in the region.
std::vector<std::size_t> cells_in_region(const CoverageGrid& grid, const VisRegion& region);

// Indices of free cells whose centers lie in the polygon.
std::vector<std::size_t> cells_in_polygon(const CoverageGrid& grid, const Polygon& poly);

// Free cells seen through one mirror (union over its facets), ascending.
std::vector<std::size_t> mirror_cells(const CoverageGrid& grid, const Camera& camera,
                                      const Mirror& mirror, const FloorPlan& plan);

// 1 for free cells inside any zone of the given kind.
std::vector<std::uint8_t> zone_membership(const Scene& scene, const CoverageGrid& grid, ZoneKind kind);

CoverageGrid coverage_map(const Scene& scene, double cell_size = kDefaultCellSize);

// Whether each scene marker falls in a covered cell.
std::vector<bool> marker_coverage(const Scene& scene, const CoverageGrid& grid);

struct MirrorAlignment {
    int mirror_id = 0;
    std::size_t target_cells_covered = 0;
    std::size_t leakage_cells = 0;
    bool aligned = true;
};

std::vector<MirrorAlignment> alignment_report(const Scene& scene, const CoverageGrid& grid);

struct CoverageSummary {
    std::size_t free_cells = 0;
    std::size_t direct_cells = 0;
    std::size_t indirect_only_cells = 0;
    std::size_t uncovered_cells = 0;
    std::size_t target_cells = 0;
    std::size_t target_cells_covered = 0;
    std::size_t markers_total = 0;
    std::size_t markers_covered = 0;
};

CoverageSummary summarize(const Scene& scene, const CoverageGrid& grid);

nlohmann::json to_json(const CoverageGrid& grid, const Scene& scene);
nlohmann::json to_json(const std::vector<MirrorAlignment>& report);

}  // namespace ivis::geo
