#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "ivis/mask/raster.hpp"

namespace ivis::mask {

// Switches for the three Target-Mask stages: indirect-vision recognizer,
// targeted mask generator and mask blender.
struct AblationConfig {
    bool ivr = true;
    bool tmg = true;
    bool mb = true;
};

struct PipelineOutput {
    ImageBuffer image;
    std::optional<MaskRaster> mask;
};

// Masks keyed by region source and frame size. A fixed camera has one entry
// for all of its images; editing a source file or the scene yields a new key.
class MaskCache {
public:
    MaskRaster get(const RegionSource& source, const std::string& image_id, int width, int height);
    std::size_t size() const;
    std::size_t misses() const;
    void clear();

private:
    mutable std::mutex mu_;
    std::map<std::string, MaskRaster> masks_;
    std::size_t misses_ = 0;
};

// Mask the pipeline would apply to an image, or none when TMG or MB is off.
// Without IVR the generator sees no regions and the mask is all zero.
std::optional<MaskRaster> pipeline_mask(const std::string& image_id, int width, int height,
                                        const RegionSource& source, const AblationConfig& ablation,
                                        MaskCache* cache = nullptr);

// TMG or MB off: the image passes through untouched and no mask is produced.
// All three on: regions, mask, blend. IVR off: all-zero mask, all-zero image.
PipelineOutput run_pipeline(const ImageBuffer& image, const std::string& image_id, const RegionSource& source,
                            const AblationConfig& ablation, MaskCache* cache = nullptr);

}  // namespace ivis::mask
