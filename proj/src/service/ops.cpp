#include "ivis/service/ops.hpp"

#include <httplib.h>

#include "ivis/error.hpp"
#include "ivis/mask/raster.hpp"

namespace ivis::service {

std::string serialize(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json coverage_document(const geo::Scene& scene, double cell_size) {
    return geo::to_json(geo::coverage_map(scene, cell_size), scene);
}

nlohmann::json alignment_document(const geo::Scene& scene, double cell_size) {
    const auto grid = geo::coverage_map(scene, cell_size);
    return {{"cell_size", cell_size}, {"mirrors", geo::to_json(geo::alignment_report(scene, grid))}};
}

nlohmann::json plan_document(const geo::Scene& scene, const std::vector<planner::MountSegment>& mounts,
                             const planner::PlannerConfig& config) {
    return planner::to_json(planner::optimize(scene, mounts, config));
}

nlohmann::json mask_preview(const geo::Scene& scene) {
    const int w = scene.camera.image_w, h = scene.camera.image_h;
    const auto quads = mask::project_all_mirrors(scene);
    const auto m = mask::generate_mask(quads, w, h);
    const auto pgm = mask::encode_pnm(mask::mask_to_image(m));
    return {{"width", w},
            {"height", h},
            {"regions", mask::to_json(quads)},
            {"masked_pixels", m.popcount()},
            {"mask_pgm_base64", httplib::detail::base64_encode(pgm)}};
}

PlanRequest plan_request_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("mounts")) throw InvalidArgument("optimize request needs \"mounts\"");
    PlanRequest r;
    r.mounts = planner::mounts_from_json(j.at("mounts"));
    if (j.contains("config")) r.config = planner::config_from_json(j.at("config"));
    planner::validate(r.config);
    return r;
}

}  // namespace ivis::service
