#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vidmine/features.hpp"
#include "vidmine/geometry.hpp"

namespace vidmine {

// A candidate region inside one video: box plus appearance feature plus the
// raw detector margin used for the detectiveness diagonal.
struct Region {
    int frame_id = 0;
    BoundingBox box;
    FeatureVector feature;
    double score = 0.0;
};

struct FrameSize {
    int width = 0;
    int height = 0;
};

struct AffinityParams {
    double alpha = 0.3;            // weight of the localization term
    double detect_floor = -3.0;    // detectiveness threshold on the raw margin
    double appearance_variance = 1.0;  // delta1^2
    double position_variance = 1.0;    // delta2^2
};

// Symmetric nonnegative affinity matrix over one video's key-frame regions.
// Off-diagonal entries fuse appearance and localization similarity; regions
// sharing a frame get affinity zero; the diagonal holds 0/1 detectiveness.
struct AffinityGraph {
    int n = 0;
    std::vector<double> a;  // n * n, symmetric
    std::vector<std::pair<int, int>> region_index;  // row -> (frame_id, region id)
    int seed_row = -1;

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct GraphMode {
    std::vector<double> y;       // point on the simplex
    std::vector<int> support;    // rows with non-negligible mass
    double density = 0.0;        // y^T A y
    bool degenerate = false;     // start had zero density, mode is the bare seed
    int iterations = 0;
};

/// Mean squared cross-frame pairwise distance of features and of normalized
/// positions (cx/W, cy/H, w/W, h/H). Returns {1, 1} when no cross-frame pair
/// exists; either value is floored at 1e-12.
std::pair<double, double> empirical_variances(const std::vector<Region>& regions,
                                              FrameSize frame);

/// Builds the affinity graph. seed_index marks the caller's seed region.
/// Off-diagonal cross-frame entries are
///   exp(-|x_i - x_j|^2 / delta1^2) + alpha * exp(-|p_i - p_j|^2 / delta2^2),
/// same-frame entries are zero, and the diagonal is 1 when the region score
/// exceeds detect_floor, else 0. Throws on non-positive variances.
AffinityGraph build_affinity(const std::vector<Region>& regions, const AffinityParams& params,
                             FrameSize frame, int seed_index);

double graph_density(const AffinityGraph& graph, const std::vector<double>& y);

/// Mode seeking by replicator dynamics y_i <- y_i (Ay)_i / (y^T A y), started
/// from 0.9 * indicator(start_row) + 0.1 * uniform. Iterates until the step
/// change drops below tol and the first-order mode conditions hold within
/// 10 * tol, or until max_iter. A start with zero density yields a degenerate
/// single-row mode with density 0.
GraphMode graph_shift_mode(const AffinityGraph& graph, int start_row, double tol = 1e-8,
                           int max_iter = 10000, double support_eps = 1e-6);

/// From the mode's support minus the seed, picks up to `count` rows with the
/// highest affinity to the seed, constrained to pairwise-distinct frames.
/// Ties break toward the lower row index. Returns empty (mode drift) when the
/// seed fell out of the support.
std::vector<int> select_tracked_instances(const AffinityGraph& graph, const GraphMode& mode,
                                          int count = 2);

}  // namespace vidmine
