#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ivis/eval/detection.hpp"

namespace ivis::eval {

inline constexpr double kDefaultIou = 0.5;
inline constexpr double kDefaultConfidenceFloor = 0.25;

struct MatchResult {
    std::size_t tp = 0, fp = 0, fn = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (detection index, gt index)
    std::vector<bool> is_tp;                                  // per detection, input order
};

// Greedy matching per (image, class): detections in descending confidence
// (ties keep input order) each take the unmatched ground truth with the
// highest IoU at or above the threshold (ties go to the earlier one).
MatchResult match_detections(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                             double iou_threshold = kDefaultIou);

// All-point interpolated AP for one class. None when the class has no ground
// truth.
std::optional<double> average_precision(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                                        int class_id, double iou_threshold = kDefaultIou);

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    std::map<int, double> per_class_ap;
    double map50 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0;
    double iou_threshold = kDefaultIou;
    double confidence_floor = kDefaultConfidenceFloor;
    std::vector<int> excluded_classes;  // detected but absent from the ground truth

    bool operator==(const EvalReport&) const = default;
};

// Precision/recall at the confidence floor; AP and mAP over all detections.
// Throws InvalidArgument when there is no ground truth.
EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                    double iou_threshold = kDefaultIou, double confidence_floor = kDefaultConfidenceFloor);

nlohmann::json to_json(const EvalReport& r);

}  // namespace ivis::eval
