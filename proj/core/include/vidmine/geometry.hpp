#pragma once

#include <vector>

namespace vidmine {

// Axis-aligned box in center format: (cx, cy) is the center in pixels,
// (w, h) the full width and height. Corner coordinates are derived on demand.
struct BoundingBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    double left() const { return cx - 0.5 * w; }
    double right() const { return cx + 0.5 * w; }
    double top() const { return cy - 0.5 * h; }
    double bottom() const { return cy + 0.5 * h; }
    double area() const { return w * h; }

    bool valid() const;
};

struct ScoredBox {
    BoundingBox box;
    double score = 0.0;
    int frame_id = 0;
    int class_id = 0;
};

struct GroundTruthBox {
    BoundingBox box;
    int class_id = 0;
    int frame_id = 0;
};

/// Intersection over union of two boxes, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);

/// Greedy non-maximum suppression. Output is sorted by descending score;
/// ties broken by lower frame_id, then by input order. A box is suppressed
/// when its IoU with an already kept higher-scoring box exceeds the threshold.
std::vector<ScoredBox> nms(const std::vector<ScoredBox>& dets, double overlap_threshold);

/// Detection average precision with all-point interpolation.
/// Detections are ranked by descending score and greedily matched against
/// unused ground-truth boxes of the same frame; a match counts as a true
/// positive when IoU >= iou_threshold. With no ground truths and no
/// detections the result is defined as 0.
double average_precision(const std::vector<ScoredBox>& dets,
                         const std::vector<GroundTruthBox>& gts,
                         double iou_threshold = 0.5);

}  // namespace vidmine
