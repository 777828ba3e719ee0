#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "ivis/geometry/coverage.hpp"

namespace ivis::planner {

using geo::Mirror;
using geo::Scene;
using geo::Segment;

// A wall stretch where a mirror can be clamped. Yaw bounds are absolute facing
// angles (radians, CCW from +x) the mirror may take.
struct MountSegment {
    Segment segment;
    double yaw_lo = 0.0;
    double yaw_hi = 0.0;
};

// Shape of the mirrors the planner may install.
struct MirrorSpec {
    double width = 0.8;
    double z_bottom = 1.0;
    double z_top = 1.6;
    bool allow_flat = true;
    bool allow_convex = true;
    double radius_min = 0.8;
    double radius_max = 3.0;
    int facet_count = 8;
    double clearance = 0.05;  // gap between the wall and the nearest chord end
};

struct PlannerConfig {
    int max_mirrors = 4;
    double w_cover = 1.0;
    double w_leak = 2.0;
    double w_count = 0.05;
    int iterations = 2000;
    double initial_temperature = 0.5;
    double cooling = 0.998;
    std::uint64_t seed = 1;
    double cell_size = geo::kDefaultCellSize;
    MirrorSpec mirror;
};

// Throws InvalidArgument for out-of-range settings.
void validate(const PlannerConfig& config);

struct Metrics {
    double score = 0.0;
    double coverage_fraction = 0.0;  // target cells covered directly or via mirrors
    double leakage_fraction = 0.0;   // non-interest cells inside any mirror view
    std::size_t target_cells = 0;
    std::size_t non_interest_cells = 0;
};

// Scores the scene's current mirrors.
Metrics evaluate_scene(const Scene& scene, const PlannerConfig& config);
double objective(const Scene& scene, const PlannerConfig& config);

struct Placement {
    std::vector<Mirror> mirrors;
    double score = 0.0;
    double coverage_fraction = 0.0;
    double leakage_fraction = 0.0;
};

// Mirror for a mount: center at parameter s along the segment, pushed off the
// wall far enough that the tilted chord clears it. radius <= 0 means flat.
Mirror mount_mirror(int id, const MountSegment& mount, double s, double yaw, double radius,
                    const MirrorSpec& spec);

// Simulated annealing over mirror count, mount position, yaw and radius,
// starting from the scene without mirrors. Existing scene mirrors are ignored.
Placement optimize(const Scene& scene, const std::vector<MountSegment>& mounts,
                   const PlannerConfig& config);

// Scene overlay: {"mirrors": [...], "metrics": {...}}.
nlohmann::json to_json(const Placement& placement);
Scene apply(const Scene& scene, const Placement& placement);

nlohmann::json to_json(const MountSegment& mount);
MountSegment mount_from_json(const nlohmann::json& j);
std::vector<MountSegment> mounts_from_json(const nlohmann::json& j);
PlannerConfig config_from_json(const nlohmann::json& j, PlannerConfig base = {});

}  // namespace ivis::planner
