#include "vidmine/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vidmine/parallel.hpp"
#include "vidmine/proposals.hpp"

namespace fs = std::filesystem;

namespace vidmine {

namespace {

constexpr std::uint64_t kSeedSelectStream = 0xA0000000ull;
constexpr std::uint64_t kRegJitterStream = 0xB0000000ull;
constexpr std::uint64_t kNegJitterStream = 0xC0000000ull;

bool is_seed_instance(const MinedInstance& inst) {
    return inst.video_id.rfind("seed:", 0) == 0;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

CorpusHandle open_corpus(const fs::path& dir) {
    CorpusHandle handle;
    handle.dir = dir;
    handle.manifest = read_manifest(dir);
    return handle;
}

std::vector<int> select_seeds(const std::vector<FeatureVector>& candidates, int k, int n_seeds,
                              Rng& rng) {
    int n = static_cast<int>(candidates.size());
    if (n == 0) return {};
    k = std::clamp(k, 1, n);
    n_seeds = std::max(0, n_seeds);

    // k-means++ seeding.
    std::vector<std::vector<double>> centroids;
    centroids.push_back(candidates[rng.below(n)].values);
    std::vector<double> d2(n, 0.0);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = squared_distance(candidates[i].values, centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, squared_distance(candidates[i].values, centroids[c]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centroids.push_back(candidates[rng.below(n)].values);
            continue;
        }
        double r = rng.uniform() * total;
        int pick = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= r) {
                pick = i;
                break;
            }
        }
        centroids.push_back(candidates[pick].values);
    }

    std::vector<int> assign(n, -1);
    for (int round = 0; round < 100; ++round) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(candidates[i].values, centroids[0]);
            for (int c = 1; c < k; ++c) {
                double d = squared_distance(candidates[i].values, centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        for (int c = 0; c < k; ++c) {
            std::vector<double> mean(candidates[0].dim(), 0.0);
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += candidates[i].values[d];
                ++count;
            }
            if (count == 0) continue;  // empty cluster keeps its centroid
            for (double& m : mean) m /= count;
            centroids[c] = std::move(mean);
        }
    }

    std::vector<int> sizes(k, 0);
    for (int i = 0; i < n; ++i) ++sizes[assign[i]];
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return a < b;
    });

    std::vector<int> picks;
    for (int c : order) {
        if (static_cast<int>(picks.size()) >= n_seeds) break;
        if (sizes[c] == 0) continue;
        int best = -1;
        double best_d = 0.0;
        for (int i = 0; i < n; ++i) {
            if (assign[i] != c) continue;
            double d = squared_distance(candidates[i].values, centroids[c]);
            if (best < 0 || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        picks.push_back(best);
    }
    return picks;
}

std::vector<NegativeExample> assemble_negative_pool(const std::vector<ImageRaster>& backgrounds,
                                                    const std::vector<SeedSource>& other_crops,
                                                    const DescriptorConfig& cfg) {
    std::vector<NegativeExample> pool;
    ProposalConfig grid;
    grid.jitter_per_box = 0;
    grid.random_count = 0;
    grid.grid = true;
    grid.grid_stride_frac = 0.25;
    grid.grid_scale_fracs = {0.3, 0.5};
    grid.grid_aspects = {1.0};
    for (const ImageRaster& frame : backgrounds) {
        for (const BoundingBox& box : grid_proposals(frame.width, frame.height, grid)) {
            NegativeExample neg;
            neg.feature = region_descriptor(frame, box, cfg);
            neg.from_background = true;
            pool.push_back(std::move(neg));
        }
    }
    // Each other-concept instance contributes its tight box plus perturbed
    // boxes: near-aligned jitters and interior sub-crops. The perturbed crops
    // are what teach a detector that an off-centre or partial view of a
    // saturated blob is not a detection; without them the score landscape
    // around every object is flat and near-miss boxes outrank tight ones.
    int crop_index = 0;
    for (const SeedSource& crop : other_crops) {
        Rng rng = Rng::derive(kNegJitterStream, crop_index++);
        auto add = [&](const BoundingBox& box) {
            NegativeExample neg;
            neg.feature = region_descriptor(crop.image, box, cfg);
            neg.from_background = false;
            neg.class_id = crop.class_id;
            pool.push_back(std::move(neg));
        };
        add(crop.box);
        for (int k = 0; k < 3; ++k) {
            BoundingBox b = crop.box;
            b.cx += rng.uniform(-0.22, 0.22) * b.w;
            b.cy += rng.uniform(-0.22, 0.22) * b.h;
            double s = rng.uniform(0.85, 1.18);
            b.w *= s;
            b.h *= s;
            add(b);
        }
        for (int k = 0; k < 2; ++k) {
            BoundingBox b = crop.box;
            b.cx += rng.uniform(-0.10, 0.10) * b.w;
            b.cy += rng.uniform(-0.10, 0.10) * b.h;
            double s = rng.uniform(0.45, 0.60);
            b.w *= s;
            b.h *= s;
            add(b);
        }
    }
    return pool;
}

LinearModel train_with_negative_pool(const std::vector<FeatureVector>& positives,
                                     const std::vector<FeatureVector>& pool,
                                     const TrainConfig& cfg) {
    std::size_t batch = static_cast<std::size_t>(std::max(1, cfg.hn_batch));
    std::size_t first = std::min(pool.size(), batch);
    std::vector<FeatureVector> initial(pool.begin(), pool.begin() + first);
    LinearModel model = train_linear_svm(positives, initial, cfg);
    if (first >= pool.size()) return model;

    std::size_t cursor = first;
    NegativeBatchSource source = [&pool, &cursor, batch]() {
        std::vector<FeatureVector> chunk;
        std::size_t take = std::min(batch, pool.size() - cursor);
        chunk.reserve(take);
        for (std::size_t i = 0; i < take; ++i) chunk.push_back(pool[cursor++]);
        return chunk;
    };
    return hard_negative_mine(model, positives, source, cfg, std::move(initial));
}

PipelineState bootstrap(const CorpusHandle& corpus, const Settings& settings) {
    PipelineState state;
    state.rng_seed = settings.rng_seed;
    state.feature_dim = settings.descriptor.region_dim();

    std::vector<ImageRaster> backgrounds = load_backgrounds(corpus.dir);
    std::vector<SeedSource> others = load_other_crops(corpus.dir);
    state.negatives = assemble_negative_pool(backgrounds, others, settings.descriptor);
    std::vector<FeatureVector> pool;
    pool.reserve(state.negatives.size());
    for (const NegativeExample& neg : state.negatives) pool.push_back(neg.feature);

    for (int c = 0; c < corpus.manifest.n_classes; ++c) {
        std::vector<SeedSource> sources = load_seed_sources(corpus.dir, c);
        if (sources.empty())
            throw std::runtime_error("no seed sources for class " + std::to_string(c));
        std::vector<FeatureVector> feats(sources.size());
        parallel_for(static_cast<int>(sources.size()), settings.threads, [&](int i) {
            feats[i] = region_descriptor(sources[i].image, sources[i].box, settings.descriptor);
        });

        Rng rng = Rng::derive(settings.rng_seed, kSeedSelectStream + static_cast<std::uint64_t>(c));
        std::vector<int> picks =
            select_seeds(feats, settings.kmeans_k, settings.seed_count, rng);
        if (picks.empty()) throw std::runtime_error("seed selection failed for class " +
                                                    std::to_string(c));

        DetectorModel det;
        det.variant = DetectorVariant::ExemplarEnsemble;
        det.class_id = c;
        det.nms_threshold = settings.nms_threshold;
        for (int idx : picks) {
            MinedInstance seed;
            seed.video_id = "seed:class_" + std::to_string(c);
            seed.frame_id = idx;
            seed.box = sources[idx].box;
            seed.feature = feats[idx];
            seed.source_iteration = 0;
            seed.seed_score = 0.0;
            state.positives[c].push_back(std::move(seed));
            det.models.push_back(train_with_negative_pool({feats[idx]}, pool, settings.train));
        }
        state.detectors[c] = std::move(det);
    }
    return state;
}

std::vector<int> iteration_batch(int n_videos, int videos_per_iteration, int iteration) {
    if (n_videos <= 0 || videos_per_iteration <= 0) return {};
    int vpi = std::min(videos_per_iteration, n_videos);
    std::vector<int> batch(vpi);
    long long start = static_cast<long long>(iteration) * vpi;
    for (int i = 0; i < vpi; ++i)
        batch[i] = static_cast<int>((start + i) % n_videos);
    return batch;
}

IterationReport run_iteration(PipelineState& state, const CorpusHandle& corpus,
                              const std::vector<int>& video_batch, const Settings& settings) {
    MiningOptions options = settings.mining_options();
    int iteration = state.iteration + 1;

    struct VideoOutcome {
        std::string video_id;
        bool loaded = false;
        std::string error;
        std::map<int, MiningResult> per_class;
    };
    int n = static_cast<int>(video_batch.size());
    std::vector<VideoOutcome> outcomes(n);

    // Workers share a snapshot of the ledger; claims merge at the barrier
    // below in (batch position, class) order so reruns agree exactly.
    parallel_for(n, settings.threads, [&](int i) {
        const VideoEntry& entry = corpus.manifest.videos.at(video_batch[i]);
        outcomes[i].video_id = entry.id;
        try {
            VideoClip clip = load_video(corpus.dir, entry);
            PreparedVideo prepared = prepare_video(clip, state.consumed, options);
            for (const auto& [c, det] : state.detectors)
                outcomes[i].per_class[c] = mine_prepared(prepared, det, options, iteration);
            outcomes[i].loaded = true;
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    IterationReport report;
    report.iteration = iteration;
    std::map<int, ClassIterationStats> stats;
    for (const auto& [c, det] : state.detectors) {
        (void)det;
        stats[c].class_id = c;
    }

    for (VideoOutcome& out : outcomes) {
        if (!out.loaded) {
            report.notes.push_back(out.video_id + ": " + out.error);
            continue;
        }
        for (auto& [c, result] : out.per_class) {
            if (result.status == MiningStatus::Error)
                report.notes.push_back(out.video_id + " class " + std::to_string(c) + ": " +
                                       result.message);
            if (result.status != MiningStatus::Mined) continue;
            int added = 0;
            for (MinedInstance& inst : result.instances) {
                if (state.consumed.count({inst.video_id, inst.frame_id})) continue;
                state.consumed.insert({inst.video_id, inst.frame_id});
                state.positives[c].push_back(std::move(inst));
                ++added;
            }
            if (added > 0) {
                stats[c].videos_mined += 1;
                stats[c].instances_added += added;
                if (result.seed_frame >= 0)
                    state.consumed.insert({out.video_id, result.seed_frame});
            }
        }
    }

    // A concept that gained instances retrains as a single classifier over
    // its grown pool; a concept with nothing new keeps its detector as-is.
    for (auto& [c, det] : state.detectors) {
        stats[c].pool_size = static_cast<int>(state.positives[c].size());
        if (stats[c].instances_added == 0) {
            report.notes.push_back("class " + std::to_string(c) +
                                   ": nothing mined, detector kept");
            continue;
        }
        std::vector<FeatureVector> pos;
        for (const MinedInstance& inst : state.positives[c]) pos.push_back(inst.feature);
        std::vector<FeatureVector> pool;
        for (const NegativeExample& neg : state.negatives) pool.push_back(neg.feature);
        if (settings.negatives_include_other_concepts) {
            for (const auto& [c2, insts] : state.positives) {
                if (c2 == c) continue;
                for (const MinedInstance& inst : insts) pool.push_back(inst.feature);
            }
        }
        LinearModel model = train_with_negative_pool(pos, pool, settings.train);
        det.variant = DetectorVariant::SingleSvm;
        det.models = {std::move(model)};
    }

    state.iteration = iteration;
    for (const auto& [c, s] : stats) {
        (void)c;
        report.classes.push_back(s);
    }
    return report;
}

void train_regressor_stage(PipelineState& state, const CorpusHandle& corpus,
                           const Settings& settings) {
    if (state.iteration < 1)
        throw std::logic_error("box regressor needs at least one completed iteration");

    for (auto& [c, insts] : state.positives) {
        if (insts.empty()) continue;
        const DetectorModel& det = state.detectors.at(c);

        std::vector<int> ranked(insts.size());
        std::iota(ranked.begin(), ranked.end(), 0);
        std::vector<double> scores(insts.size());
        for (std::size_t i = 0; i < insts.size(); ++i) scores[i] = det.score(insts[i].feature);
        std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });
        int top = std::min(settings.regressor_top_k,
                           static_cast<int>(std::ceil(settings.regressor_top_fraction *
                                                      static_cast<double>(insts.size()))));
        top = std::clamp(top, 1, static_cast<int>(insts.size()));
        ranked.resize(top);

        // Group pseudo ground truth by source video so each loads once.
        std::map<std::string, std::vector<int>> by_video;
        for (int idx : ranked) by_video[insts[idx].video_id].push_back(idx);

        std::vector<SeedSource> seed_sources;
        bool seed_sources_loaded = false;
        std::vector<RegressionPair> pairs;

        for (const auto& [video_id, indices] : by_video) {
            if (is_seed_instance(insts[indices.front()])) {
                if (!seed_sources_loaded) {
                    seed_sources = load_seed_sources(corpus.dir, c);
                    seed_sources_loaded = true;
                }
                for (int idx : indices) {
                    const MinedInstance& inst = insts[idx];
                    if (inst.frame_id < 0 ||
                        inst.frame_id >= static_cast<int>(seed_sources.size()))
                        continue;
                    const ImageRaster& image = seed_sources[inst.frame_id].image;
                    ProposalConfig jitter;
                    jitter.jitter_per_box = 12;
                    jitter.jitter_center_frac = 0.05;
                    jitter.jitter_scale_sigma = 0.08;
                    jitter.random_count = 0;
                    Rng rng = Rng::derive(state.rng_seed,
                                          kRegJitterStream +
                                              static_cast<std::uint64_t>(c) * 65536ull +
                                              static_cast<std::uint64_t>(idx));
                    for (const BoundingBox& prop :
                         generate_proposals(image.width, image.height, {inst.box}, jitter, rng)) {
                        if (iou(prop, inst.box) <= settings.regressor_min_iou) continue;
                        pairs.push_back({prop, region_descriptor(image, prop, settings.descriptor),
                                         inst.box});
                    }
                }
                continue;
            }
            const VideoEntry* entry = nullptr;
            for (const VideoEntry& e : corpus.manifest.videos)
                if (e.id == video_id) entry = &e;
            if (entry == nullptr) continue;
            VideoClip clip = load_video(corpus.dir, *entry);
            for (int idx : indices) {
                const MinedInstance& inst = insts[idx];
                const ImageRaster* image = nullptr;
                for (const VideoFrame& f : clip.frames)
                    if (f.frame_id == inst.frame_id) image = &f.image;
                auto it = clip.proposals.find(inst.frame_id);
                if (image == nullptr || it == clip.proposals.end()) continue;
                for (const BoundingBox& prop : it->second) {
                    if (iou(prop, inst.box) <= settings.regressor_min_iou) continue;
                    pairs.push_back({prop, region_descriptor(*image, prop, settings.descriptor),
                                     inst.box});
                }
            }
        }

        if (pairs.size() < 4) {
            std::cerr << "regressor: class " << c << " has only " << pairs.size()
                      << " tight pairs, skipping\n";
            state.regressors.erase(c);
            continue;
        }
        state.regressors[c] = train_bbox_regressor(pairs, settings.regressor_lambda);
    }
}

EvalSet build_eval_set(const std::vector<TestFrame>& frames, const DescriptorConfig& cfg,
                       int threads) {
    EvalSet eval;
    eval.frames.resize(frames.size());
    parallel_for(static_cast<int>(frames.size()), threads, [&](int i) {
        const TestFrame& src = frames[i];
        EvalFrame& dst = eval.frames[i];
        dst.frame_id = src.frame_id;
        dst.boxes = src.proposals;
        dst.features.reserve(src.proposals.size());
        for (const BoundingBox& box : src.proposals)
            dst.features.push_back(region_descriptor(src.image, box, cfg));
    });
    for (const TestFrame& src : frames)
        eval.ground_truth.insert(eval.ground_truth.end(), src.annotations.begin(),
                                 src.annotations.end());
    return eval;
}

namespace {

std::vector<ScoredBox> collect_detections(const PipelineState& state, const EvalSet& eval,
                                          const Settings& settings, bool use_regression,
                                          int class_id) {
    const DetectorModel& det = state.detectors.at(class_id);
    const BBoxRegressor* reg = nullptr;
    if (use_regression) {
        auto it = state.regressors.find(class_id);
        if (it != state.regressors.end()) reg = &it->second;
    }

    constexpr std::size_t kPreNmsCap = 300;
    std::vector<ScoredBox> all;
    for (const EvalFrame& frame : eval.frames) {
        std::vector<ScoredBox> scored;
        scored.reserve(frame.boxes.size());
        for (std::size_t i = 0; i < frame.boxes.size(); ++i) {
            ScoredBox sb;
            sb.box = frame.boxes[i];
            sb.score = det.score(frame.features[i]);
            if (reg) sb.box = apply_bbox_regression(*reg, sb.box, frame.features[i]);
            sb.frame_id = frame.frame_id;
            sb.class_id = class_id;
            scored.push_back(sb);
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const ScoredBox& a, const ScoredBox& b) { return a.score > b.score; });
        if (scored.size() > kPreNmsCap) scored.resize(kPreNmsCap);
        std::vector<ScoredBox> kept = nms(scored, settings.nms_threshold);
        all.insert(all.end(), kept.begin(), kept.end());
    }
    return all;
}

}  // namespace

std::map<int, double> evaluate(const PipelineState& state, const EvalSet& eval,
                               const Settings& settings, bool use_regression) {
    std::map<int, double> ap;
    for (const auto& [c, det] : state.detectors) {
        (void)det;
        std::vector<ScoredBox> dets = collect_detections(state, eval, settings, use_regression, c);
        std::vector<GroundTruthBox> gts;
        for (const GroundTruthBox& g : eval.ground_truth)
            if (g.class_id == c) gts.push_back(g);
        ap[c] = average_precision(dets, gts, settings.eval_iou);
    }
    return ap;
}

LocalizationStats localization_stats(const PipelineState& state, const EvalSet& eval,
                                     const Settings& settings, bool use_regression) {
    LocalizationStats out;
    double err_sum = 0.0;
    double iou_sum = 0.0;
    for (const auto& [c, det] : state.detectors) {
        (void)det;
        std::vector<ScoredBox> dets = collect_detections(state, eval, settings, use_regression, c);
        std::stable_sort(dets.begin(), dets.end(),
                         [](const ScoredBox& a, const ScoredBox& b) { return a.score > b.score; });
        std::vector<GroundTruthBox> gts;
        for (const GroundTruthBox& g : eval.ground_truth)
            if (g.class_id == c) gts.push_back(g);
        std::vector<bool> used(gts.size(), false);
        for (const ScoredBox& d : dets) {
            int best = -1;
            double best_iou = 0.0;
            for (std::size_t g = 0; g < gts.size(); ++g) {
                if (used[g] || gts[g].frame_id != d.frame_id) continue;
                double v = iou(d.box, gts[g].box);
                if (v > best_iou) {
                    best_iou = v;
                    best = static_cast<int>(g);
                }
            }
            if (best < 0 || best_iou < settings.eval_iou) continue;
            used[best] = true;
            err_sum += std::hypot(d.box.cx - gts[best].box.cx, d.box.cy - gts[best].box.cy);
            iou_sum += best_iou;
            ++out.matched;
        }
    }
    if (out.matched > 0) {
        out.mean_center_error = err_sum / out.matched;
        out.mean_iou = iou_sum / out.matched;
    }
    return out;
}

void refresh_pool_features(PipelineState& state, const FeatureRefreshHook& hook) {
    for (auto& [c, insts] : state.positives) {
        (void)c;
        for (MinedInstance& inst : insts) inst.feature = hook(inst);
    }
}

void write_report_csv(const fs::path& path, const std::vector<ReportRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "iteration,class_id,ap,pool_size,videos_mined\n";
    char buf[64];
    for (const ReportRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f", r.ap);
        out << r.iteration << ',' << r.class_id << ',' << buf << ',' << r.pool_size << ','
            << r.videos_mined << '\n';
    }
}

std::vector<ReportRow> read_report_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "iteration,class_id,ap,pool_size,videos_mined")
        throw std::runtime_error("unexpected report header in " + path.string());
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ReportRow r;
        char comma;
        std::istringstream ss(line);
        if (!(ss >> r.iteration >> comma >> r.class_id >> comma >> r.ap >> comma >> r.pool_size >>
              comma >> r.videos_mined))
            throw std::runtime_error("malformed report row in " + path.string());
        rows.push_back(r);
    }
    return rows;
}

}  // namespace vidmine
