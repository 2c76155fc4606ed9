#include "vidmine/proposals.hpp"

#include <algorithm>
#include <cmath>

namespace vidmine {

BoundingBox clamp_box_to_frame(const BoundingBox& box, int width, int height) {
    BoundingBox b = box;
    b.w = std::min(b.w, static_cast<double>(width));
    b.h = std::min(b.h, static_cast<double>(height));
    b.cx = std::clamp(b.cx, b.w / 2.0, width - b.w / 2.0);
    b.cy = std::clamp(b.cy, b.h / 2.0, height - b.h / 2.0);
    return b;
}

std::vector<BoundingBox> grid_proposals(int width, int height, const ProposalConfig& cfg) {
    std::vector<BoundingBox> out;
    double base = std::min(width, height);
    double sx = std::max(1.0, cfg.grid_stride_frac * width);
    double sy = std::max(1.0, cfg.grid_stride_frac * height);
    int nx = std::max(1, static_cast<int>(std::floor(width / sx)));
    int ny = std::max(1, static_cast<int>(std::floor(height / sy)));
    for (double scale : cfg.grid_scale_fracs) {
        for (double aspect : cfg.grid_aspects) {
            double size = scale * base;
            double w = size * std::sqrt(aspect);
            double h = size / std::sqrt(aspect);
            for (int iy = 0; iy < ny; ++iy) {
                for (int ix = 0; ix < nx; ++ix) {
                    BoundingBox b;
                    b.cx = (ix + 0.5) * sx;
                    b.cy = (iy + 0.5) * sy;
                    b.w = w;
                    b.h = h;
                    out.push_back(clamp_box_to_frame(b, width, height));
                }
            }
        }
    }
    return out;
}

std::vector<BoundingBox> generate_proposals(int width, int height,
                                            const std::vector<BoundingBox>& reference_boxes,
                                            const ProposalConfig& cfg, Rng& rng) {
    std::vector<BoundingBox> out;

    for (const BoundingBox& ref : reference_boxes) {
        for (int k = 0; k < cfg.jitter_per_box; ++k) {
            BoundingBox b = ref;
            b.cx += rng.gaussian() * cfg.jitter_center_frac * ref.w;
            b.cy += rng.gaussian() * cfg.jitter_center_frac * ref.h;
            b.w *= std::exp(rng.gaussian() * cfg.jitter_scale_sigma);
            b.h *= std::exp(rng.gaussian() * cfg.jitter_scale_sigma);
            out.push_back(clamp_box_to_frame(b, width, height));
        }
    }

    double base = std::min(width, height);
    for (int k = 0; k < cfg.random_count; ++k) {
        double size = base * rng.uniform(cfg.random_min_frac, cfg.random_max_frac);
        double aspect = rng.uniform(cfg.random_aspect_min, cfg.random_aspect_max);
        BoundingBox b;
        b.w = size * std::sqrt(aspect);
        b.h = size / std::sqrt(aspect);
        b.cx = rng.uniform(0.0, width);
        b.cy = rng.uniform(0.0, height);
        out.push_back(clamp_box_to_frame(b, width, height));
    }

    if (cfg.grid) {
        std::vector<BoundingBox> grid = grid_proposals(width, height, cfg);
        out.insert(out.end(), grid.begin(), grid.end());
    }

    std::vector<BoundingBox> kept;
    for (const BoundingBox& b : out) {
        bool dup = false;
        for (const BoundingBox& k : kept) {
            if (iou(b, k) > cfg.dedup_iou) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(b);
    }
    return kept;
}

}  // namespace vidmine
