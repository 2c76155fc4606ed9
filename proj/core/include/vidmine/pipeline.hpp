#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vidmine/config.hpp"
#include "vidmine/corpus.hpp"
#include "vidmine/detector.hpp"
#include "vidmine/mining.hpp"
#include "vidmine/rng.hpp"

namespace vidmine {

struct NegativeExample {
    FeatureVector feature;
    bool from_background = true;  // false: crop of another concept
    int class_id = -1;            // source class for other-concept crops
};

// Whole pipeline state between iterations: per-concept positive pools, the
// shared negative pool, current detectors and regressors, and the ledger of
// frames whose content already entered a pool.
struct PipelineState {
    int iteration = 0;  // completed mining iterations; 0 right after bootstrap
    std::uint64_t rng_seed = 0;
    int feature_dim = 0;
    std::map<int, std::vector<MinedInstance>> positives;
    std::vector<NegativeExample> negatives;
    std::map<int, DetectorModel> detectors;
    std::map<int, BBoxRegressor> regressors;  // only classes with enough pairs
    FrameLedger consumed;
};

struct CorpusHandle {
    std::filesystem::path dir;
    CorpusManifest manifest;
};

CorpusHandle open_corpus(const std::filesystem::path& dir);

/// Deterministic k-means over the candidate features (k-means++ seeding from
/// `rng`, assignments until stable), then one representative per cluster for
/// the n_seeds largest clusters: the member closest to its centroid. Ties
/// break toward the lower index throughout.
std::vector<int> select_seeds(const std::vector<FeatureVector>& candidates, int k, int n_seeds,
                              Rng& rng);

/// Shared negative pool: dense crops from object-free background frames plus
/// one crop per other-concept source image.
std::vector<NegativeExample> assemble_negative_pool(const std::vector<ImageRaster>& backgrounds,
                                                    const std::vector<SeedSource>& other_crops,
                                                    const DescriptorConfig& cfg);

/// Trains one classifier with the usual scheme: an initial model on the first
/// negative batch, then hard-negative rounds over the rest of the pool.
LinearModel train_with_negative_pool(const std::vector<FeatureVector>& positives,
                                     const std::vector<FeatureVector>& pool,
                                     const TrainConfig& cfg);

/// Stage one: pick seed exemplars per concept and train the per-exemplar
/// classifier ensembles against the shared negative pool.
PipelineState bootstrap(const CorpusHandle& corpus, const Settings& settings);

struct ClassIterationStats {
    int class_id = 0;
    int videos_mined = 0;
    int instances_added = 0;
    int pool_size = 0;
};

struct IterationReport {
    int iteration = 0;
    std::vector<ClassIterationStats> classes;
    std::vector<std::string> notes;  // per-video diagnostics worth surfacing
};

/// The video indices iteration `iteration` works through: a contiguous
/// window of length videos_per_iteration, cycling over the corpus.
std::vector<int> iteration_batch(int n_videos, int videos_per_iteration, int iteration);

/// One mining iteration over the given batch: prepare each video once, mine
/// it for every concept, merge instances in (batch position, class) order
/// with the ledger deciding conflicts, then retrain every concept as a single
/// classifier over its grown pool.
IterationReport run_iteration(PipelineState& state, const CorpusHandle& corpus,
                              const std::vector<int>& video_batch, const Settings& settings);

/// Fits the per-concept box regressors on the highest-scoring pool instances
/// (pseudo ground truth). Classes without enough tight proposal pairs keep no
/// regressor. Requires at least one completed iteration.
void train_regressor_stage(PipelineState& state, const CorpusHandle& corpus,
                           const Settings& settings);

// Test frames digested for repeated evaluation: proposals plus features.
struct EvalFrame {
    int frame_id = 0;
    std::vector<BoundingBox> boxes;
    std::vector<FeatureVector> features;
};

struct EvalSet {
    std::vector<EvalFrame> frames;
    std::vector<GroundTruthBox> ground_truth;
};

EvalSet build_eval_set(const std::vector<TestFrame>& frames, const DescriptorConfig& cfg,
                       int threads);

/// Per-class average precision on the eval set: raw scores, optional box
/// regression, per-frame NMS, then the all-point interpolated AP.
std::map<int, double> evaluate(const PipelineState& state, const EvalSet& eval,
                               const Settings& settings, bool use_regression);

struct LocalizationStats {
    double mean_center_error = 0.0;
    double mean_iou = 0.0;
    int matched = 0;
};

/// Center error and IoU of true-positive detections, for judging the box
/// regressor. Matching follows the AP protocol at settings.eval_iou.
LocalizationStats localization_stats(const PipelineState& state, const EvalSet& eval,
                                     const Settings& settings, bool use_regression);

/// Re-embeds every pooled instance through the hook. The default hook is the
/// identity; the seam exists so a changed feature space can refresh the pool
/// without re-mining.
using FeatureRefreshHook = std::function<FeatureVector(const MinedInstance&)>;
void refresh_pool_features(PipelineState& state, const FeatureRefreshHook& hook);

struct ReportRow {
    int iteration = 0;
    int class_id = 0;
    double ap = 0.0;
    int pool_size = 0;
    int videos_mined = 0;
};

void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);

}  // namespace vidmine
