#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vidmine/detector.hpp"
#include "vidmine/mining.hpp"
#include "vidmine/simulator.hpp"

namespace vidmine {

// Ordered key=value store parsed from a config file. Later occurrences win,
// which is how command-line --set overrides work: they are appended last.
class ConfigMap {
  public:
    static ConfigMap parse_file(const std::filesystem::path& path);
    static ConfigMap parse_text(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

  private:
    const std::string* find(const std::string& key) const;
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Every tunable of the pipeline in one place, filled from a ConfigMap.
struct Settings {
    std::uint64_t rng_seed = 42;
    int threads = 0;  // 0 picks the hardware count
    std::string corpus_dir;

    DescriptorConfig descriptor;
    // The classic exemplar constants (0.5, 0.01) assume feature norms well
    // above 1; on the unit-norm descriptor the hinge margins are unreachable
    // and training collapses to scoring everything like a negative. These
    // values restore the margin regime against the standard negative pool.
    TrainConfig train{.c_positive = 10.0, .c_negative = 0.05};
    double nms_threshold = 0.3;

    double alpha = 0.3;
    double detect_floor = -3.0;
    double graph_tol = 1e-8;
    int graph_max_iter = 10000;
    double support_eps = 1e-6;
    int top_regions = 200;

    // Calibrated for the built-in descriptor: ~30% of frames become key
    // frames under the simulator's standard motion model, and seed scores
    // on target videos sit well above distractor and noisy-video peaks at
    // this cut.
    double gist_threshold = 0.05;
    double seed_threshold = 0.6;
    int instances_per_video = 2;

    int n_iterations = 5;
    int seed_count = 2;
    int kmeans_k = 10;
    int videos_per_iteration = 0;  // 0 spreads the corpus over n_iterations
    bool negatives_include_other_concepts = true;

    int regressor_top_k = 2000;
    double regressor_top_fraction = 0.2;
    double regressor_min_iou = 0.8;
    double regressor_lambda = 1.0;
    double eval_iou = 0.5;

    WorldConfig world;

    MiningOptions mining_options() const;
};

/// Translates a ConfigMap into Settings. Throws std::runtime_error on an
/// unknown key or an unparsable value, naming the offender.
Settings settings_from_config(const ConfigMap& config);

}  // namespace vidmine
