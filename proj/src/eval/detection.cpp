#include "ivis/eval/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ivis/error.hpp"

namespace ivis::eval {

void validate(const BBox& b) {
    if (!std::isfinite(b.x_min) || !std::isfinite(b.y_min) || !std::isfinite(b.x_max) || !std::isfinite(b.y_max)) {
        throw ValidationError("bbox coordinates must be finite");
    }
    if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) throw ValidationError("bbox must have x_max > x_min and y_max > y_min");
}

void validate(const Detection& d) {
    validate(d.bbox);
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) throw ValidationError("confidence must be in [0, 1]");
}

double iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0 || ih <= 0) return 0.0;
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

double inside_fraction(const BBox& b, const mask::MaskRaster& m) {
    const long c0 = static_cast<long>(std::ceil(b.x_min - 0.5));
    const long c1 = static_cast<long>(std::ceil(b.x_max - 0.5)) - 1;
    const long r0 = static_cast<long>(std::ceil(b.y_min - 0.5));
    const long r1 = static_cast<long>(std::ceil(b.y_max - 0.5)) - 1;
    auto masked = [&](long x, long y) {
        return x >= 0 && y >= 0 && x < m.width && y < m.height && m.get(static_cast<int>(x), static_cast<int>(y));
    };
    if (c1 < c0 || r1 < r0) {
        const auto x = static_cast<long>(std::floor((b.x_min + b.x_max) / 2));
        const auto y = static_cast<long>(std::floor((b.y_min + b.y_max) / 2));
        return masked(x, y) ? 1.0 : 0.0;
    }
    std::size_t hit = 0;
    for (long y = std::max(r0, 0L); y <= std::min(r1, static_cast<long>(m.height) - 1); ++y) {
        for (long x = std::max(c0, 0L); x <= std::min(c1, static_cast<long>(m.width) - 1); ++x) hit += masked(x, y);
    }
    const double total = static_cast<double>(c1 - c0 + 1) * static_cast<double>(r1 - r0 + 1);
    return static_cast<double>(hit) / total;
}

std::vector<Detection> filter_detections(const std::vector<Detection>& dets, const mask::MaskRaster& m,
                                         double min_inside, int image_w, int image_h) {
    if (m.width != image_w || m.height != image_h) {
        throw ValidationError("mask is " + std::to_string(m.width) + "x" + std::to_string(m.height) +
                              " but images are " + std::to_string(image_w) + "x" + std::to_string(image_h));
    }
    if (!(min_inside >= 0.0 && min_inside <= 1.0)) throw InvalidArgument("min_inside must be in [0, 1]");
    std::vector<Detection> out;
    for (const auto& d : dets) {
        if (inside_fraction(d.bbox, m) >= min_inside) out.push_back(d);
    }
    return out;
}

namespace {

nlohmann::json bbox_json(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

BBox bbox_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw ValidationError("bbox must be [x_min, y_min, x_max, y_max]");
    BBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    validate(b);
    return b;
}

std::string image_id_from(const nlohmann::json& j) {
    const auto& v = j.at("image_id");
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ValidationError("image_id must be a string or an integer");
}

template <typename T, typename F>
std::vector<T> parse_lines(const std::string& text, F parse) {
    std::istringstream in(text);
    std::vector<T> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const Detection& d) {
    return {{"image_id", d.image_id}, {"class_id", d.class_id}, {"bbox", bbox_json(d.bbox)}, {"confidence", d.confidence}};
}

nlohmann::json to_json(const GroundTruthBox& g) {
    return {{"image_id", g.image_id}, {"class_id", g.class_id}, {"bbox", bbox_json(g.bbox)}};
}

Detection detection_from_json(const nlohmann::json& j) {
    Detection d;
    d.image_id = image_id_from(j);
    d.class_id = j.at("class_id").get<int>();
    d.bbox = bbox_from(j.at("bbox"));
    d.confidence = j.value("confidence", 1.0);
    validate(d);
    return d;
}

GroundTruthBox ground_truth_from_json(const nlohmann::json& j) {
    return {image_id_from(j), j.at("class_id").get<int>(), bbox_from(j.at("bbox"))};
}

std::string to_jsonl(const std::vector<Detection>& dets) {
    std::string out;
    for (const auto& d : dets) out += to_json(d).dump() + "\n";
    return out;
}

std::string to_jsonl(const std::vector<GroundTruthBox>& gts) {
    std::string out;
    for (const auto& g : gts) out += to_json(g).dump() + "\n";
    return out;
}

std::vector<Detection> parse_detections(const std::string& text) {
    return parse_lines<Detection>(text, detection_from_json);
}

std::vector<GroundTruthBox> parse_ground_truths(const std::string& text) {
    return parse_lines<GroundTruthBox>(text, ground_truth_from_json);
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
    return parse_detections(mask::read_file(path));
}

std::vector<GroundTruthBox> load_ground_truths(const std::filesystem::path& path) {
    return parse_ground_truths(mask::read_file(path));
}

}  // namespace ivis::eval
