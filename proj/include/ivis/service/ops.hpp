#pragma once

// Operations shared by the CLI and the HTTP service. Both front ends call
// these and write `serialize` output, so the same inputs give the same bytes.

#include <string>
#include <vector>

#include <json.hpp>

#include "ivis/geometry/coverage.hpp"
#include "ivis/planner/planner.hpp"

namespace ivis::service {

std::string serialize(const nlohmann::json& j);

nlohmann::json coverage_document(const geo::Scene& scene, double cell_size);
nlohmann::json alignment_document(const geo::Scene& scene, double cell_size);
nlohmann::json plan_document(const geo::Scene& scene, const std::vector<planner::MountSegment>& mounts,
                             const planner::PlannerConfig& config);

// Projected mirror quads plus the resulting mask as a base64 binary PGM.
nlohmann::json mask_preview(const geo::Scene& scene);

// Optimize request: {"mounts": [...], "config": {...}}, config optional.
struct PlanRequest {
    std::vector<planner::MountSegment> mounts;
    planner::PlannerConfig config;
};
PlanRequest plan_request_from_json(const nlohmann::json& j);

}  // namespace ivis::service
