#include "vidmine/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vidmine {

namespace {

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

void check_dims(const std::vector<FeatureVector>& positives,
                const std::vector<FeatureVector>& negatives) {
    if (positives.empty()) throw std::invalid_argument("svm: empty positive class");
    if (negatives.empty()) throw std::invalid_argument("svm: empty negative class");
    const std::size_t d = positives.front().dim();
    for (const auto& x : positives)
        if (x.dim() != d) throw std::invalid_argument("svm: feature dimension mismatch");
    for (const auto& x : negatives)
        if (x.dim() != d) throw std::invalid_argument("svm: feature dimension mismatch");
}

// Cholesky solve of the SPD system A x = b, in place on copies.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
                a[i * n + i] = std::sqrt(s);
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
    return b;
}

}  // namespace

double LinearModel::score(const FeatureVector& x) const {
    if (x.dim() != weights.size()) throw std::invalid_argument("score: feature dimension mismatch");
    return dot(weights, x.values) + bias;
}

double DetectorModel::score(const FeatureVector& x) const {
    if (models.empty()) throw std::logic_error("detector has no models");
    double best = models.front().score(x);
    for (std::size_t i = 1; i < models.size(); ++i) best = std::max(best, models[i].score(x));
    return best;
}

double svm_objective(const LinearModel& m, const std::vector<FeatureVector>& positives,
                     const std::vector<FeatureVector>& negatives, const TrainConfig& cfg) {
    double obj = 0.5 * (dot(m.weights, m.weights) + m.bias * m.bias);
    for (const auto& x : positives) obj += cfg.c_positive * std::max(0.0, 1.0 - m.score(x));
    for (const auto& x : negatives) obj += cfg.c_negative * std::max(0.0, 1.0 + m.score(x));
    return obj;
}

LinearModel train_linear_svm(const std::vector<FeatureVector>& positives,
                             const std::vector<FeatureVector>& negatives,
                             const TrainConfig& cfg, TrainReport* report) {
    check_dims(positives, negatives);
    const std::size_t dim = positives.front().dim();
    const std::size_t n_pos = positives.size();
    const std::size_t n = n_pos + negatives.size();

    // Examples in fixed order: positives first, then negatives. The bias is an
    // implicit extra feature of value 1, so example squared norms get +1.
    auto feature_of = [&](std::size_t i) -> const std::vector<double>& {
        return i < n_pos ? positives[i].values : negatives[i - n_pos].values;
    };
    auto label_of = [&](std::size_t i) { return i < n_pos ? 1.0 : -1.0; };
    auto cost_of = [&](std::size_t i) { return i < n_pos ? cfg.c_positive : cfg.c_negative; };

    std::vector<double> qdiag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x = feature_of(i);
        qdiag[i] = dot(x, x) + 1.0;
    }

    LinearModel m;
    m.weights.assign(dim, 0.0);
    m.bias = 0.0;
    std::vector<double> alpha(n, 0.0);

    LinearModel best = m;
    double best_obj = svm_objective(m, positives, negatives, cfg);
    double prev_obj = best_obj;

    TrainReport local;
    TrainReport& rep = report ? *report : local;
    rep.objective_history.clear();

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& x = feature_of(i);
            const double y = label_of(i);
            const double margin = y * (dot(m.weights, x) + m.bias);
            const double grad = margin - 1.0;
            const double a_new = std::clamp(alpha[i] - grad / qdiag[i], 0.0, cost_of(i));
            const double delta = a_new - alpha[i];
            if (delta != 0.0) {
                const double step = delta * y;
                for (std::size_t k = 0; k < dim; ++k) m.weights[k] += step * x[k];
                m.bias += step;
                alpha[i] = a_new;
            }
        }

        const double obj = svm_objective(m, positives, negatives, cfg);
        if (obj < best_obj) {
            best_obj = obj;
            best = m;
        }
        rep.objective_history.push_back(best_obj);
        rep.epochs = epoch + 1;

        const double rel = std::abs(prev_obj - obj) / std::max(1.0, std::abs(obj));
        if (rel < cfg.convergence_tol && epoch > 0) break;
        prev_obj = obj;
    }

    rep.final_objective = best_obj;
    return best;
}

LinearModel hard_negative_mine(const LinearModel& model,
                               const std::vector<FeatureVector>& positives,
                               const NegativeBatchSource& source, const TrainConfig& cfg,
                               std::vector<FeatureVector> initial_negatives) {
    LinearModel current = model;
    std::vector<FeatureVector> active = std::move(initial_negatives);
    bool exhausted = false;

    for (int round = 0; round < cfg.hn_rounds && !exhausted; ++round) {
        std::vector<FeatureVector> violators;
        while (static_cast<int>(violators.size()) < cfg.hn_batch) {
            std::vector<FeatureVector> batch = source();
            if (batch.empty()) {
                exhausted = true;
                break;
            }
            for (auto& x : batch) {
                if (current.score(x) > -1.0) violators.push_back(std::move(x));
            }
        }
        if (violators.empty()) break;
        active.insert(active.end(), std::make_move_iterator(violators.begin()),
                      std::make_move_iterator(violators.end()));
        current = train_linear_svm(positives, active, cfg);
    }
    return current;
}

std::vector<ScoredBox> detect(const std::vector<BoundingBox>& boxes,
                              const std::vector<FeatureVector>& features,
                              const DetectorModel& model, int frame_id) {
    if (boxes.size() != features.size())
        throw std::invalid_argument("detect: boxes/features size mismatch");
    std::vector<ScoredBox> dets;
    dets.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        dets.push_back({boxes[i], model.score(features[i]), frame_id, model.class_id});
    }
    return nms(dets, model.nms_threshold);
}

std::array<double, 4> encode_box_deltas(const BoundingBox& proposal, const BoundingBox& target) {
    return {(target.cx - proposal.cx) / proposal.w, (target.cy - proposal.cy) / proposal.h,
            std::log(target.w / proposal.w), std::log(target.h / proposal.h)};
}

BBoxRegressor train_bbox_regressor(const std::vector<RegressionPair>& pairs, double ridge_lambda) {
    if (pairs.size() < 4) throw std::invalid_argument("insufficient regression data");
    const std::size_t d = pairs.front().feature.dim();
    const std::size_t n = d + 1;  // intercept column

    // Shared Gram matrix X^T X + lambda I, four right-hand sides.
    std::vector<double> gram(n * n, 0.0);
    std::array<std::vector<double>, 4> rhs;
    for (auto& r : rhs) r.assign(n, 0.0);

    for (const auto& p : pairs) {
        if (p.feature.dim() != d)
            throw std::invalid_argument("regressor: feature dimension mismatch");
        const auto t = encode_box_deltas(p.proposal, p.target);
        std::vector<double> x(p.feature.values);
        x.push_back(1.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) gram[i * n + j] += x[i] * x[j];
            for (int h = 0; h < 4; ++h) rhs[h][i] += x[i] * t[h];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) gram[i * n + j] = gram[j * n + i];
        gram[i * n + i] += ridge_lambda;
    }

    BBoxRegressor reg;
    for (int h = 0; h < 4; ++h) {
        std::vector<double> beta = solve_spd(gram, rhs[h], n);
        reg.heads[h].bias = beta.back();
        beta.pop_back();
        reg.heads[h].weights = std::move(beta);
    }
    return reg;
}

BoundingBox apply_bbox_regression(const BBoxRegressor& reg, const BoundingBox& box,
                                  const FeatureVector& feat) {
    const double dx = reg.heads[0].score(feat);
    const double dy = reg.heads[1].score(feat);
    const double dlogw = reg.heads[2].score(feat);
    const double dlogh = reg.heads[3].score(feat);
    return {box.cx + dx * box.w, box.cy + dy * box.h, box.w * std::exp(dlogw),
            box.h * std::exp(dlogh)};
}

}  // namespace vidmine
