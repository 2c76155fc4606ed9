#pragma once

#include <array>
#include <functional>
#include <vector>

#include "vidmine/features.hpp"
#include "vidmine/geometry.hpp"

namespace vidmine {

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    double score(const FeatureVector& x) const;
};

enum class DetectorVariant { ExemplarEnsemble, SingleSvm };

// Either an ensemble of per-exemplar classifiers (bootstrap) or one retrained
// classifier per concept (later iterations). Region scores are raw margins.
struct DetectorModel {
    DetectorVariant variant = DetectorVariant::SingleSvm;
    std::vector<LinearModel> models;  // non-empty; exactly one for SingleSvm
    int class_id = 0;
    double nms_threshold = 0.3;

    double score(const FeatureVector& x) const;  // max over ensemble members
};

struct TrainConfig {
    double c_positive = 0.5;
    double c_negative = 0.01;
    int hn_rounds = 3;
    int hn_batch = 256;
    double convergence_tol = 1e-8;
    int max_epochs = 2000;
    double ridge_lambda = 1e-6;
};

struct TrainReport {
    std::vector<double> objective_history;  // primal objective after each epoch
    int epochs = 0;
    double final_objective = 0.0;
};

/// Regularized hinge objective minimized by train_linear_svm:
///   0.5 (||w||^2 + b^2) + c_pos * sum hinge(pos) + c_neg * sum hinge(neg).
/// The bias is regularized (trained as an extra unit-valued feature).
double svm_objective(const LinearModel& m, const std::vector<FeatureVector>& positives,
                     const std::vector<FeatureVector>& negatives, const TrainConfig& cfg);

/// Deterministic linear SVM training: cyclic dual coordinate descent over the
/// inputs in their given order, with a best-so-far primal safeguard so the
/// reported objective sequence is non-increasing. Throws on empty classes or
/// mismatched dimensions.
LinearModel train_linear_svm(const std::vector<FeatureVector>& positives,
                             const std::vector<FeatureVector>& negatives,
                             const TrainConfig& cfg, TrainReport* report = nullptr);

/// Streaming source of negative features; returns an empty batch when exhausted.
using NegativeBatchSource = std::function<std::vector<FeatureVector>()>;

/// Classic hard-negative mining: scan the source, collect margin violators
/// (score > -1), retrain on positives plus the accumulated active set, repeat
/// for cfg.hn_rounds rounds or until a scan finds no new violator.
/// `initial_negatives` seeds the active set (the negatives the input model was
/// trained on, so retraining never forgets them).
LinearModel hard_negative_mine(const LinearModel& model,
                               const std::vector<FeatureVector>& positives,
                               const NegativeBatchSource& source, const TrainConfig& cfg,
                               std::vector<FeatureVector> initial_negatives = {});

/// Scores each region with the detector (max over exemplar members for
/// ensembles) and applies NMS at model.nms_threshold. boxes and features are
/// parallel arrays for one frame.
std::vector<ScoredBox> detect(const std::vector<BoundingBox>& boxes,
                              const std::vector<FeatureVector>& features,
                              const DetectorModel& model, int frame_id);

// Four ridge-regression heads predicting (dx, dy, dlogw, dlogh) from a region
// feature, trained on proposals that overlap a target box tightly.
struct BBoxRegressor {
    std::array<LinearModel, 4> heads;
};

struct RegressionPair {
    BoundingBox proposal;
    FeatureVector feature;
    BoundingBox target;
};

/// Target transform: dx = (Gx-Px)/Pw, dy = (Gy-Py)/Ph, dlogw = log(Gw/Pw),
/// dlogh = log(Gh/Ph).
std::array<double, 4> encode_box_deltas(const BoundingBox& proposal, const BoundingBox& target);

/// Closed-form ridge regression (normal equations, intercept regularized too).
/// Throws when fewer than 4 pairs are given. Callers pre-filter pairs to
/// IoU > 0.8 between proposal and target.
BBoxRegressor train_bbox_regressor(const std::vector<RegressionPair>& pairs, double ridge_lambda);

/// Inverse of the target transform; output width/height stay positive.
BoundingBox apply_bbox_regression(const BBoxRegressor& reg, const BoundingBox& box,
                                  const FeatureVector& feat);

}  // namespace vidmine
