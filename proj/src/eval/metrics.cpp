#include "ivis/eval/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "ivis/error.hpp"

namespace ivis::eval {

MatchResult match_detections(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                             double iou_threshold) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });

    std::map<std::pair<std::string, int>, std::vector<std::size_t>> gt_index;
    for (std::size_t g = 0; g < gts.size(); ++g) gt_index[{gts[g].image_id, gts[g].class_id}].push_back(g);

    MatchResult r;
    r.is_tp.assign(dets.size(), false);
    std::vector<bool> taken(gts.size(), false);
    for (std::size_t d : order) {
        const auto it = gt_index.find({dets[d].image_id, dets[d].class_id});
        std::optional<std::size_t> best;
        double best_iou = iou_threshold;
        if (it != gt_index.end()) {
            for (std::size_t g : it->second) {
                if (taken[g]) continue;
                const double v = iou(dets[d].bbox, gts[g].bbox);
                if (v >= best_iou && (!best || v > best_iou)) {
                    best = g;
                    best_iou = v;
                }
            }
        }
        if (best) {
            taken[*best] = true;
            r.is_tp[d] = true;
            r.pairs.emplace_back(d, *best);
            ++r.tp;
        } else {
            ++r.fp;
        }
    }
    r.fn = gts.size() - r.tp;
    return r;
}

std::optional<double> average_precision(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                                        int class_id, double iou_threshold) {
    std::vector<Detection> cd;
    std::vector<GroundTruthBox> cg;
    for (const auto& d : dets) {
        if (d.class_id == class_id) cd.push_back(d);
    }
    for (const auto& g : gts) {
        if (g.class_id == class_id) cg.push_back(g);
    }
    if (cg.empty()) return std::nullopt;

    const MatchResult m = match_detections(cd, cg, iou_threshold);
    std::vector<std::size_t> order(cd.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cd[a].confidence > cd[b].confidence; });

    // Precision after each ranked detection, then the monotone envelope. Each
    // true positive raises recall by 1/n, so AP is the envelope summed over
    // the true-positive ranks, divided by n. Extended precision keeps results
    // like 5/6 correctly rounded.
    std::vector<long double> prec(order.size());
    std::vector<bool> hit(order.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        hit[k] = m.is_tp[order[k]];
        tp += hit[k] ? 1 : 0;
        prec[k] = static_cast<long double>(tp) / static_cast<long double>(k + 1);
    }
    for (std::size_t k = prec.size(); k > 1; --k) prec[k - 2] = std::max(prec[k - 2], prec[k - 1]);
    long double sum = 0.0L;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (hit[k]) sum += prec[k];
    }
    return static_cast<double>(sum / static_cast<long double>(cg.size()));
}

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts, double iou_threshold,
                    double confidence_floor) {
    if (gts.empty()) throw InvalidArgument("no ground truth boxes to evaluate against");
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw InvalidArgument("iou threshold must be in (0, 1]");
    EvalReport r;
    r.iou_threshold = iou_threshold;
    r.confidence_floor = confidence_floor;

    std::vector<Detection> scored;
    for (const auto& d : dets) {
        if (d.confidence >= confidence_floor) scored.push_back(d);
    }
    const MatchResult m = match_detections(scored, gts, iou_threshold);
    r.tp = m.tp;
    r.fp = m.fp;
    r.fn = m.fn;
    r.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    r.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);

    std::set<int> gt_classes, det_classes;
    for (const auto& g : gts) gt_classes.insert(g.class_id);
    for (const auto& d : dets) det_classes.insert(d.class_id);
    double sum = 0.0;
    for (int c : gt_classes) {
        const double ap = *average_precision(dets, gts, c, iou_threshold);
        r.per_class_ap[c] = ap;
        sum += ap;
    }
    r.map50 = sum / static_cast<double>(gt_classes.size());
    for (int c : det_classes) {
        if (!gt_classes.count(c)) r.excluded_classes.push_back(c);
    }
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json ap = nlohmann::json::object();
    for (const auto& [c, v] : r.per_class_ap) ap[std::to_string(c)] = v;
    return {{"precision", r.precision},
            {"recall", r.recall},
            {"per_class_ap", ap},
            {"map50", r.map50},
            {"tp", r.tp},
            {"fp", r.fp},
            {"fn", r.fn},
            {"iou_threshold", r.iou_threshold},
            {"confidence_floor", r.confidence_floor},
            {"excluded_classes", r.excluded_classes}};
}

}  // namespace ivis::eval
