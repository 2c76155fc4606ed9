#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vidmine/corpus.hpp"
#include "vidmine/detector.hpp"
#include "vidmine/graph_shift.hpp"

namespace vidmine {

// Frames whose content already entered a positive pool. Mining never touches
// a consumed frame again, so an instance is pulled into at most one concept.
using FrameKey = std::pair<std::string, int>;
using FrameLedger = std::set<FrameKey>;

struct KeyFrame {
    int frame_id = 0;
    FrameDescriptor descriptor;
};

struct KeyFrameSet {
    std::string video_id;
    std::vector<KeyFrame> frames;
};

struct MiningOptions {
    double gist_threshold = 0.05;
    double seed_threshold = 1.0;
    int top_regions = 200;
    int instances_per_video = 2;
    AffinityParams affinity;  // variances are replaced per video
    double graph_tol = 1e-8;
    int graph_max_iter = 10000;
    double support_eps = 1e-6;
    DescriptorConfig descriptor;
};

enum class MiningStatus {
    Mined,
    NoKeyFrames,   // every key frame already consumed
    NoProposals,
    NoSeed,        // best detection under the seed threshold
    Degenerate,    // zero-density start, graph carries no mass
    ModeDrift,     // converged mode abandoned the seed
    NoInstances,   // mode held the seed but no usable second frame
    Error,
};
const char* to_string(MiningStatus status);

struct MinedInstance {
    std::string video_id;
    int frame_id = 0;
    BoundingBox box;
    FeatureVector feature;
    int source_iteration = 0;  // 0 marks bootstrap seeds
    double seed_score = 0.0;
};

struct MiningResult {
    MiningStatus status = MiningStatus::Error;
    std::vector<MinedInstance> instances;
    int seed_frame = -1;
    std::string message;
};

// One video digested for mining: key frames plus featureized proposals.
// Computed once per video and shared across concepts.
struct PreparedRegion {
    int frame_id = 0;
    BoundingBox box;
    FeatureVector feature;
};

struct PreparedVideo {
    std::string video_id;
    FrameSize frame;
    std::vector<KeyFrame> key_frames;
    std::vector<PreparedRegion> regions;
};

/// Walks the clip and keeps a frame whenever its frame descriptor moved more
/// than gist_threshold away from the last kept frame. The first frame is
/// always kept.
KeyFrameSet select_key_frames(const VideoClip& clip, double gist_threshold,
                              const DescriptorConfig& cfg);

/// Key frames minus the consumed ledger, with proposals featureized. Falls
/// back to a sliding-window grid when the clip carries no stored proposals.
PreparedVideo prepare_video(const VideoClip& clip, const FrameLedger& consumed,
                            const MiningOptions& options);

/// Scores every region with the detector and returns the index of the best
/// detection when its margin clears seed_threshold. Ties prefer the earlier
/// frame, then the earlier region.
std::optional<int> select_video_seed(const std::vector<PreparedRegion>& regions,
                                     const DetectorModel& detector, double seed_threshold);

/// Full mining pass over a prepared video: seed, affinity graph over the
/// top-scoring regions, mode seeking, then instance selection.
MiningResult mine_prepared(const PreparedVideo& prepared, const DetectorModel& detector,
                           const MiningOptions& options, int iteration);

/// prepare_video + mine_prepared with a catch-all: any thrown error comes
/// back as MiningStatus::Error so one bad video cannot abort an iteration.
MiningResult mine_video(const VideoClip& clip, const DetectorModel& detector,
                        const MiningOptions& options, const FrameLedger& consumed, int iteration);

}  // namespace vidmine
