#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivis/mask/image.hpp"

namespace ivis::eval {

// Axis-aligned box in pixels. A pixel belongs to the box when its center
// (x + 0.5, y + 0.5) satisfies x_min <= cx < x_max and y_min <= cy < y_max.
struct BBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool operator==(const BBox&) const = default;
};

struct Detection {
    std::string image_id;
    int class_id = 0;
    BBox bbox;
    double confidence = 1.0;
    bool operator==(const Detection&) const = default;
};

struct GroundTruthBox {
    std::string image_id;
    int class_id = 0;
    BBox bbox;
    bool operator==(const GroundTruthBox&) const = default;
};

// Throws ValidationError for non-finite or empty boxes and confidences
// outside [0, 1].
void validate(const BBox& b);
void validate(const Detection& d);

double iou(const BBox& a, const BBox& b);

// Fraction of the box's pixels that the mask marks. Pixels beyond the frame
// count as unmasked. A box too thin to contain any pixel center is judged by
// the pixel under its center.
double inside_fraction(const BBox& b, const mask::MaskRaster& m);

// Keeps detections whose inside_fraction reaches min_inside, in input order.
// Throws ValidationError when the mask does not match the image size.
std::vector<Detection> filter_detections(const std::vector<Detection>& dets, const mask::MaskRaster& m,
                                         double min_inside, int image_w, int image_h);

nlohmann::json to_json(const Detection& d);
nlohmann::json to_json(const GroundTruthBox& g);
Detection detection_from_json(const nlohmann::json& j);
GroundTruthBox ground_truth_from_json(const nlohmann::json& j);

// JSON Lines, one box per line.
std::string to_jsonl(const std::vector<Detection>& dets);
std::string to_jsonl(const std::vector<GroundTruthBox>& gts);
std::vector<Detection> parse_detections(const std::string& text);
std::vector<GroundTruthBox> parse_ground_truths(const std::string& text);
std::vector<Detection> load_detections(const std::filesystem::path& path);
std::vector<GroundTruthBox> load_ground_truths(const std::filesystem::path& path);

}  // namespace ivis::eval
