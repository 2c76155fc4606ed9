#include "vidmine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace vidmine {

bool BoundingBox::valid() const {
    return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) &&
           w > 0.0 && h > 0.0;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<ScoredBox> nms(const std::vector<ScoredBox>& dets, double overlap_threshold) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (dets[i].score != dets[j].score) return dets[i].score > dets[j].score;
        return dets[i].frame_id < dets[j].frame_id;
    });

    std::vector<ScoredBox> kept;
    for (std::size_t idx : order) {
        bool suppressed = false;
        for (const ScoredBox& k : kept) {
            if (k.frame_id == dets[idx].frame_id &&
                iou(k.box, dets[idx].box) > overlap_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(dets[idx]);
    }
    return kept;
}

double average_precision(const std::vector<ScoredBox>& dets,
                         const std::vector<GroundTruthBox>& gts,
                         double iou_threshold) {
    if (gts.empty()) {
        if (dets.empty()) {
            std::fprintf(stderr, "[vidmine] average_precision: no ground truths and no detections, AP defined as 0\n");
        }
        return 0.0;
    }
    if (dets.empty()) return 0.0;

    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (dets[i].score != dets[j].score) return dets[i].score > dets[j].score;
        return dets[i].frame_id < dets[j].frame_id;
    });

    std::vector<bool> gt_used(gts.size(), false);
    std::vector<int> is_tp(dets.size(), 0);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const ScoredBox& d = dets[order[rank]];
        double best_iou = 0.0;
        std::size_t best_gt = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gt_used[g] || gts[g].frame_id != d.frame_id || gts[g].class_id != d.class_id)
                continue;
            const double ov = iou(d.box, gts[g].box);
            if (ov > best_iou) {
                best_iou = ov;
                best_gt = g;
            }
        }
        if (best_gt < gts.size() && best_iou >= iou_threshold) {
            gt_used[best_gt] = true;
            is_tp[rank] = 1;
        }
    }

    // Precision/recall at each rank, then area under the upper envelope.
    const double n_gt = static_cast<double>(gts.size());
    std::vector<double> recall(dets.size()), precision(dets.size());
    int tp = 0;
    for (std::size_t r = 0; r < dets.size(); ++r) {
        tp += is_tp[r];
        recall[r] = tp / n_gt;
        precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    }

    std::vector<double> envelope(dets.size());
    double p_max = 0.0;
    for (std::size_t r = dets.size(); r-- > 0;) {
        p_max = std::max(p_max, precision[r]);
        envelope[r] = p_max;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t r = 0; r < dets.size(); ++r) {
        if (recall[r] == prev_recall) continue;
        ap += (recall[r] - prev_recall) * envelope[r];
        prev_recall = recall[r];
    }
    return ap;
}

}  // namespace vidmine
