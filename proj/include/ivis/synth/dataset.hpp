#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivis/eval/detection.hpp"
#include "ivis/mask/regions.hpp"

namespace ivis::synth {

inline constexpr int kFireClass = 0;

struct SynthConfig {
    std::uint64_t seed = 7;
    int num_images = 800;
    int image_w = 640;
    int image_h = 480;
    int fire_min = 1;  // fires per image
    int fire_max = 3;
    double noise_image_fraction = 0.125;  // images carrying flags
    double noise_fp_rate = 1.0;           // chance each flag is reported as a fire
    int noise_region = 0;                 // non-interest zone id, 0 = first one
    double jitter = 2.0;                  // pixels
    double miss_rate = 0.05;
    double train_fraction = 0.7;
    double val_fraction = 0.15;
};

// Throws InvalidArgument for out-of-range settings.
void validate(const SynthConfig& config);

enum class Split { train, val, test };
std::string_view split_name(Split s);

struct SynthImage {
    std::string id;
    std::uint64_t render_seed = 0;
    Split split = Split::train;
    std::vector<eval::BBox> fires;  // ground truth, also what gets painted
    std::vector<int> fire_quad;     // index into regions for each fire
    std::vector<eval::BBox> flags;  // noise drawn in the non-interest band
};

// Everything except pixels. Images are rendered on demand from the per-image
// seed so an 800-image set does not sit in memory.
struct SynthDataset {
    SynthConfig config;
    geo::Camera camera;                     // scene camera rescaled to the image size
    std::vector<mask::QuadRegion> regions;  // same for every image: the camera is fixed
    eval::BBox noise_band;                  // image-space box of the non-interest zone
    std::vector<SynthImage> images;

    std::vector<eval::GroundTruthBox> ground_truth() const;
    std::size_t count(Split s) const;
};

// Needs at least one mirror projecting into the frame and a non-interest zone
// whose band stays clear of every mirror quad.
SynthDataset synth_dataset(const geo::Scene& scene, const SynthConfig& config);

mask::ImageBuffer render_image(const SynthDataset& data, std::size_t index);

// Ground truth with seeded misses, corner jitter and confidences, plus a
// false "fire" on each flag with probability noise_fp_rate.
std::vector<eval::Detection> oracle_detector(const SynthDataset& data, const SynthConfig& config);

nlohmann::json split_json(const SynthDataset& data);
nlohmann::json flags_json(const SynthDataset& data);
SynthConfig config_from_json(const nlohmann::json& j, SynthConfig base = {});
nlohmann::json to_json(const SynthConfig& c);

}  // namespace ivis::synth
