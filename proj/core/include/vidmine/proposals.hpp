#pragma once

#include <vector>

#include "vidmine/geometry.hpp"
#include "vidmine/rng.hpp"

namespace vidmine {

// Knobs for the class-agnostic proposal generator. Each arm can be switched
// off: the simulator stores jitter+random boxes for video frames and
// grid+random boxes for evaluation frames so no annotation leaks through.
struct ProposalConfig {
    int jitter_per_box = 10;          // copies per reference box, 0 disables
    double jitter_center_frac = 0.06; // center noise, fraction of box size
    double jitter_scale_sigma = 0.10; // log-scale noise
    int random_count = 25;            // 0 disables
    double random_min_frac = 0.15;    // box size range, fraction of min(W, H)
    double random_max_frac = 0.65;
    double random_aspect_min = 0.6;
    double random_aspect_max = 1.6;
    bool grid = false;
    double grid_stride_frac = 0.125;  // stride as fraction of frame size
    std::vector<double> grid_scale_fracs = {0.25, 0.4, 0.6};
    std::vector<double> grid_aspects = {0.7, 1.0, 1.45};
    double dedup_iou = 0.95;
};

/// Clamps the box so it lies inside the frame, shifting the center and
/// shrinking only when the box is larger than the frame.
BoundingBox clamp_box_to_frame(const BoundingBox& box, int width, int height);

/// Deterministic sliding-window boxes over the frame. Pure function of the
/// config, no randomness.
std::vector<BoundingBox> grid_proposals(int width, int height, const ProposalConfig& cfg);

/// Union of jittered reference boxes, uniform random boxes and the sliding
/// grid, in that order, deduplicated at IoU > dedup_iou (first kept wins).
/// All boxes are clamped inside the frame.
std::vector<BoundingBox> generate_proposals(int width, int height,
                                            const std::vector<BoundingBox>& reference_boxes,
                                            const ProposalConfig& cfg, Rng& rng);

}  // namespace vidmine
