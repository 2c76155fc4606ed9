#include "vidmine/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vidmine {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::runtime_error("config value for '" + key + "' is unusable: '" + value + "'");
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

ConfigMap ConfigMap::parse_text(const std::string& text) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     " is not key=value: '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + " has an empty key");
        map.set(key, value);
    }
    return map;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

const std::string* ConfigMap::find(const std::string& key) const {
    const std::string* found = nullptr;
    for (const auto& [k, v] : entries_)
        if (k == key) found = &v;
    return found;
}

bool ConfigMap::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        double d = std::stod(*v, &pos);
        if (pos != v->size()) bad_value(key, *v);
        return d;
    } catch (const std::logic_error&) {
        bad_value(key, *v);
    }
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        int i = std::stoi(*v, &pos);
        if (pos != v->size()) bad_value(key, *v);
        return i;
    } catch (const std::logic_error&) {
        bad_value(key, *v);
    }
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        unsigned long long u = std::stoull(*v, &pos);
        if (pos != v->size()) bad_value(key, *v);
        return u;
    } catch (const std::logic_error&) {
        bad_value(key, *v);
    }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, *v);
}

MiningOptions Settings::mining_options() const {
    MiningOptions opt;
    opt.gist_threshold = gist_threshold;
    opt.seed_threshold = seed_threshold;
    opt.top_regions = top_regions;
    opt.instances_per_video = instances_per_video;
    opt.affinity.alpha = alpha;
    opt.affinity.detect_floor = detect_floor;
    opt.graph_tol = graph_tol;
    opt.graph_max_iter = graph_max_iter;
    opt.support_eps = support_eps;
    opt.descriptor = descriptor;
    return opt;
}

Settings settings_from_config(const ConfigMap& config) {
    static const std::set<std::string> known = {
        "rng_seed", "threads", "corpus_dir",
        "descriptor_cells", "orientation_bins", "resample_size", "context_pad_fraction",
        "gradient_gain", "frame_cells", "frame_orientation_bins",
        "c_positive", "c_negative", "hn_rounds", "hn_batch", "svm_tol", "svm_max_epochs",
        "ridge_lambda", "nms_threshold",
        "alpha", "detect_floor", "graph_tol", "graph_max_iter", "support_eps", "top_regions",
        "gist_threshold", "seed_threshold", "instances_per_video",
        "n_iterations", "seed_count", "kmeans_k", "videos_per_iteration",
        "negatives_include_other_concepts",
        "regressor_top_k", "regressor_top_fraction", "regressor_min_iou", "regressor_lambda",
        "eval_iou",
        "sim_classes", "sim_distractor_classes", "sim_videos_per_class", "sim_frames_per_video",
        "sim_noisy_fraction", "sim_image_size", "sim_max_distractors",
        "sim_seed_sources_per_class", "sim_background_frames", "sim_other_crops",
        "sim_test_frames", "sim_hue_jitter", "sim_camera_jitter",
    };
    for (const auto& [key, value] : config.entries()) {
        (void)value;
        if (!known.count(key)) throw std::runtime_error("unknown config key '" + key + "'");
    }

    Settings s;
    s.rng_seed = config.get_u64("rng_seed", s.rng_seed);
    s.threads = config.get_int("threads", s.threads);
    s.corpus_dir = config.get_string("corpus_dir", s.corpus_dir);

    s.descriptor.cells = config.get_int("descriptor_cells", s.descriptor.cells);
    s.descriptor.orientation_bins = config.get_int("orientation_bins", s.descriptor.orientation_bins);
    s.descriptor.resample_size = config.get_int("resample_size", s.descriptor.resample_size);
    s.descriptor.context_pad_fraction =
        config.get_double("context_pad_fraction", s.descriptor.context_pad_fraction);
    s.descriptor.gradient_gain = config.get_double("gradient_gain", s.descriptor.gradient_gain);
    s.descriptor.frame_cells = config.get_int("frame_cells", s.descriptor.frame_cells);
    s.descriptor.frame_orientation_bins =
        config.get_int("frame_orientation_bins", s.descriptor.frame_orientation_bins);

    s.train.c_positive = config.get_double("c_positive", s.train.c_positive);
    s.train.c_negative = config.get_double("c_negative", s.train.c_negative);
    s.train.hn_rounds = config.get_int("hn_rounds", s.train.hn_rounds);
    s.train.hn_batch = config.get_int("hn_batch", s.train.hn_batch);
    s.train.convergence_tol = config.get_double("svm_tol", s.train.convergence_tol);
    s.train.max_epochs = config.get_int("svm_max_epochs", s.train.max_epochs);
    s.train.ridge_lambda = config.get_double("ridge_lambda", s.train.ridge_lambda);
    s.nms_threshold = config.get_double("nms_threshold", s.nms_threshold);

    s.alpha = config.get_double("alpha", s.alpha);
    s.detect_floor = config.get_double("detect_floor", s.detect_floor);
    s.graph_tol = config.get_double("graph_tol", s.graph_tol);
    s.graph_max_iter = config.get_int("graph_max_iter", s.graph_max_iter);
    s.support_eps = config.get_double("support_eps", s.support_eps);
    s.top_regions = config.get_int("top_regions", s.top_regions);

    s.gist_threshold = config.get_double("gist_threshold", s.gist_threshold);
    s.seed_threshold = config.get_double("seed_threshold", s.seed_threshold);
    s.instances_per_video = config.get_int("instances_per_video", s.instances_per_video);

    s.n_iterations = config.get_int("n_iterations", s.n_iterations);
    s.seed_count = config.get_int("seed_count", s.seed_count);
    s.kmeans_k = config.get_int("kmeans_k", s.kmeans_k);
    s.videos_per_iteration = config.get_int("videos_per_iteration", s.videos_per_iteration);
    s.negatives_include_other_concepts =
        config.get_bool("negatives_include_other_concepts", s.negatives_include_other_concepts);

    s.regressor_top_k = config.get_int("regressor_top_k", s.regressor_top_k);
    s.regressor_top_fraction = config.get_double("regressor_top_fraction", s.regressor_top_fraction);
    s.regressor_min_iou = config.get_double("regressor_min_iou", s.regressor_min_iou);
    s.regressor_lambda = config.get_double("regressor_lambda", s.regressor_lambda);
    s.eval_iou = config.get_double("eval_iou", s.eval_iou);

    s.world.rng_seed = s.rng_seed;
    s.world.n_classes = config.get_int("sim_classes", s.world.n_classes);
    s.world.distractor_classes =
        config.get_int("sim_distractor_classes", s.world.distractor_classes);
    s.world.videos_per_class = config.get_int("sim_videos_per_class", s.world.videos_per_class);
    s.world.frames_per_video = config.get_int("sim_frames_per_video", s.world.frames_per_video);
    s.world.noisy_fraction = config.get_double("sim_noisy_fraction", s.world.noisy_fraction);
    int size = config.get_int("sim_image_size", s.world.image_width);
    s.world.image_width = size;
    s.world.image_height = size;
    s.world.max_distractors = config.get_int("sim_max_distractors", s.world.max_distractors);
    s.world.seed_sources_per_class =
        config.get_int("sim_seed_sources_per_class", s.world.seed_sources_per_class);
    s.world.background_frames = config.get_int("sim_background_frames", s.world.background_frames);
    s.world.other_crops = config.get_int("sim_other_crops", s.world.other_crops);
    s.world.test_frames = config.get_int("sim_test_frames", s.world.test_frames);
    s.world.hue_jitter = config.get_double("sim_hue_jitter", s.world.hue_jitter);
    s.world.camera_jitter = config.get_double("sim_camera_jitter", s.world.camera_jitter);
    return s;
}

}  // namespace vidmine
