#pragma once

#include <cstdint>
#include <vector>

#include "ivis/geometry/scene.hpp"
#include "ivis/planner/planner.hpp"

namespace ivis::synth {

inline constexpr std::uint64_t kDefaultSceneSeed = 2024;

// Storage hall with a camera at the entrance. The seed picks a T-shaped
// (even) or L-shaped (odd) plan and jitters zone positions by a few
// centimeters. Always four target zones, one non-interest band along the far
// wall, the camera at the entrance looking in, four convex mirrors each aimed
// at one target zone, and one marker at the center of each target zone.
// Exactly two targets are in direct view.
geo::Scene synth_scene(std::uint64_t seed = kDefaultSceneSeed);

// Same scene with the mirrors removed.
geo::Scene synth_scene_direct_only(std::uint64_t seed = kDefaultSceneSeed);

struct PlannerBenchmark {
    geo::Scene scene;  // no mirrors
    std::vector<planner::MountSegment> mounts;
};

// L-shaped room: the camera sits in the lower arm, a target pocket hides at
// the top of the upper arm, and a non-interest patch lies next to the corner
// the mirror has to look past.
PlannerBenchmark planner_benchmark();

}  // namespace ivis::synth
