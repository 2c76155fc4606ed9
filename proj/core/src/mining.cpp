#include "vidmine/mining.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vidmine/proposals.hpp"

namespace vidmine {

const char* to_string(MiningStatus status) {
    switch (status) {
        case MiningStatus::Mined: return "mined";
        case MiningStatus::NoKeyFrames: return "no_key_frames";
        case MiningStatus::NoProposals: return "no_proposals";
        case MiningStatus::NoSeed: return "no_seed";
        case MiningStatus::Degenerate: return "degenerate";
        case MiningStatus::ModeDrift: return "mode_drift";
        case MiningStatus::NoInstances: return "no_instances";
        case MiningStatus::Error: return "error";
    }
    return "unknown";
}

KeyFrameSet select_key_frames(const VideoClip& clip, double gist_threshold,
                              const DescriptorConfig& cfg) {
    KeyFrameSet set;
    set.video_id = clip.video_id;
    for (const VideoFrame& frame : clip.frames) {
        FrameDescriptor desc = frame_descriptor(frame.image, cfg);
        if (set.frames.empty() ||
            descriptor_distance(desc, set.frames.back().descriptor) > gist_threshold) {
            set.frames.push_back({frame.frame_id, std::move(desc)});
        }
    }
    return set;
}

PreparedVideo prepare_video(const VideoClip& clip, const FrameLedger& consumed,
                            const MiningOptions& options) {
    PreparedVideo prepared;
    prepared.video_id = clip.video_id;
    if (!clip.frames.empty()) {
        prepared.frame.width = clip.frames.front().image.width;
        prepared.frame.height = clip.frames.front().image.height;
    }

    KeyFrameSet keys = select_key_frames(clip, options.gist_threshold, options.descriptor);
    for (KeyFrame& kf : keys.frames) {
        if (consumed.count({clip.video_id, kf.frame_id})) continue;
        prepared.key_frames.push_back(std::move(kf));
    }

    for (const KeyFrame& kf : prepared.key_frames) {
        const ImageRaster* image = nullptr;
        for (const VideoFrame& frame : clip.frames)
            if (frame.frame_id == kf.frame_id) image = &frame.image;
        if (image == nullptr) continue;

        std::vector<BoundingBox> boxes;
        auto it = clip.proposals.find(kf.frame_id);
        if (it != clip.proposals.end() && !it->second.empty()) {
            boxes = it->second;
        } else {
            ProposalConfig fallback;
            fallback.jitter_per_box = 0;
            fallback.random_count = 0;
            fallback.grid = true;
            boxes = grid_proposals(image->width, image->height, fallback);
        }
        for (const BoundingBox& box : boxes) {
            PreparedRegion region;
            region.frame_id = kf.frame_id;
            region.box = box;
            region.feature = region_descriptor(*image, box, options.descriptor);
            prepared.regions.push_back(std::move(region));
        }
    }
    return prepared;
}

std::optional<int> select_video_seed(const std::vector<PreparedRegion>& regions,
                                     const DetectorModel& detector, double seed_threshold) {
    int best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        double s = detector.score(regions[i].feature);
        if (best < 0 || s > best_score) {
            best = static_cast<int>(i);
            best_score = s;
        }
    }
    if (best < 0 || best_score <= seed_threshold) return std::nullopt;
    return best;
}

MiningResult mine_prepared(const PreparedVideo& prepared, const DetectorModel& detector,
                           const MiningOptions& options, int iteration) {
    MiningResult result;
    if (prepared.key_frames.empty()) {
        result.status = MiningStatus::NoKeyFrames;
        return result;
    }
    if (prepared.regions.empty()) {
        result.status = MiningStatus::NoProposals;
        return result;
    }

    std::vector<double> scores(prepared.regions.size());
    for (std::size_t i = 0; i < prepared.regions.size(); ++i)
        scores[i] = detector.score(prepared.regions[i].feature);

    std::optional<int> seed = select_video_seed(prepared.regions, detector, options.seed_threshold);
    if (!seed) {
        result.status = MiningStatus::NoSeed;
        return result;
    }
    result.seed_frame = prepared.regions[*seed].frame_id;
    double seed_score = scores[*seed];

    // Keep only the strongest regions; the graph is quadratic in node count.
    std::vector<int> order(prepared.regions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    if (static_cast<int>(order.size()) > options.top_regions)
        order.resize(options.top_regions);
    std::sort(order.begin(), order.end());

    std::vector<Region> nodes;
    int seed_row = -1;
    nodes.reserve(order.size());
    for (int idx : order) {
        if (idx == *seed) seed_row = static_cast<int>(nodes.size());
        const PreparedRegion& r = prepared.regions[idx];
        nodes.push_back({r.frame_id, r.box, r.feature, scores[idx]});
    }

    AffinityParams params = options.affinity;
    auto [dv1, dv2] = empirical_variances(nodes, prepared.frame);
    params.appearance_variance = dv1;
    params.position_variance = dv2;

    AffinityGraph graph = build_affinity(nodes, params, prepared.frame, seed_row);
    GraphMode mode = graph_shift_mode(graph, seed_row, options.graph_tol, options.graph_max_iter,
                                      options.support_eps);
    if (mode.degenerate) {
        result.status = MiningStatus::Degenerate;
        return result;
    }

    std::vector<int> picked = select_tracked_instances(graph, mode, options.instances_per_video);
    if (picked.empty()) {
        bool seed_in_support =
            std::find(mode.support.begin(), mode.support.end(), seed_row) != mode.support.end();
        result.status = seed_in_support ? MiningStatus::NoInstances : MiningStatus::ModeDrift;
        return result;
    }

    for (int row : picked) {
        const Region& node = nodes[row];
        MinedInstance inst;
        inst.video_id = prepared.video_id;
        inst.frame_id = node.frame_id;
        inst.box = node.box;
        inst.feature = node.feature;
        inst.source_iteration = iteration;
        inst.seed_score = seed_score;
        result.instances.push_back(std::move(inst));
    }
    result.status = MiningStatus::Mined;
    return result;
}

MiningResult mine_video(const VideoClip& clip, const DetectorModel& detector,
                        const MiningOptions& options, const FrameLedger& consumed, int iteration) {
    try {
        PreparedVideo prepared = prepare_video(clip, consumed, options);
        return mine_prepared(prepared, detector, options, iteration);
    } catch (const std::exception& e) {
        MiningResult result;
        result.status = MiningStatus::Error;
        result.message = clip.video_id + ": " + e.what();
        return result;
    }
}

}  // namespace vidmine
