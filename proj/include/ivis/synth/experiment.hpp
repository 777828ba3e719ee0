#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ivis/eval/metrics.hpp"
#include "ivis/mask/pipeline.hpp"
#include "ivis/synth/dataset.hpp"

namespace ivis::synth {

inline constexpr double kDefaultMinInside = 0.5;

struct AblationRow {
    mask::AblationConfig ablation;
    eval::EvalReport report;
    std::size_t detections_kept = 0;
};

struct ExperimentReport {
    std::size_t images = 0;
    std::size_t noise_images = 0;
    std::size_t detections = 0;
    double min_inside = kDefaultMinInside;
    eval::EvalReport baseline;
    eval::EvalReport masked;
    // False positives whose box center lies in the non-interest band.
    std::size_t band_fp_baseline = 0;
    std::size_t band_fp_masked = 0;
    std::vector<AblationRow> ablation;  // every IVR/TMG/MB switch combination
};

// Baseline scores the detections as they are; each ablation row filters them
// against the mask its switch setting yields (none: unchanged).
ExperimentReport run_experiment(const geo::Scene& scene, const SynthDataset& data,
                                const std::vector<eval::Detection>& dets, double min_inside = kDefaultMinInside);

// Generates the dataset and oracle detections, then compares.
ExperimentReport run_experiment(const geo::Scene& scene, const SynthConfig& config,
                                double min_inside = kDefaultMinInside);

nlohmann::json to_json(const ExperimentReport& r);

// Images per second through the full mask pipeline (render excluded) over the
// first max_images images, with a warm mask cache. Wall-clock, so never part
// of the report files.
double pipeline_throughput(const geo::Scene& scene, const SynthDataset& data, std::size_t max_images = 50);

// Plain-text detector comparison and ablation tables,
// with the published numbers printed as reference rows.
std::string format_tables(const ExperimentReport& r);

}  // namespace ivis::synth
