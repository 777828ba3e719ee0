#include "ivis/mask/pipeline.hpp"

namespace ivis::mask {

MaskRaster MaskCache::get(const RegionSource& source, const std::string& image_id, int width, int height) {
    const std::string key = cache_key(source, image_id) + "|" + std::to_string(width) + "x" + std::to_string(height);
    {
        std::lock_guard lock(mu_);
        if (auto it = masks_.find(key); it != masks_.end()) return it->second;
    }
    MaskRaster m = generate_mask(identify_regions(image_id, source), width, height);
    std::lock_guard lock(mu_);
    ++misses_;
    return masks_.emplace(key, std::move(m)).first->second;
}

std::size_t MaskCache::size() const {
    std::lock_guard lock(mu_);
    return masks_.size();
}

std::size_t MaskCache::misses() const {
    std::lock_guard lock(mu_);
    return misses_;
}

void MaskCache::clear() {
    std::lock_guard lock(mu_);
    masks_.clear();
    misses_ = 0;
}

std::optional<MaskRaster> pipeline_mask(const std::string& image_id, int width, int height,
                                        const RegionSource& source, const AblationConfig& ablation,
                                        MaskCache* cache) {
    if (!ablation.tmg || !ablation.mb) return std::nullopt;
    if (!ablation.ivr) return MaskRaster::zeros(width, height);
    if (cache) return cache->get(source, image_id, width, height);
    return generate_mask(identify_regions(image_id, source), width, height);
}

PipelineOutput run_pipeline(const ImageBuffer& image, const std::string& image_id, const RegionSource& source,
                            const AblationConfig& ablation, MaskCache* cache) {
    auto mask = pipeline_mask(image_id, image.width, image.height, source, ablation, cache);
    if (!mask) return {image, std::nullopt};
    return {blend(image, *mask), std::move(mask)};
}

}  // namespace ivis::mask
