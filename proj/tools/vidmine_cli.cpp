// Command-line front end for the video mining pipeline.
//
// Exit codes: 0 success, 1 runtime failure (I/O, missing corpus, bad state),
// 2 usage or config errors (unknown key, malformed value, bad flags).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "vidmine/config.hpp"
#include "vidmine/corpus.hpp"
#include "vidmine/mining.hpp"
#include "vidmine/pipeline.hpp"
#include "vidmine/simulator.hpp"
#include "vidmine/state_io.hpp"

namespace fs = std::filesystem;
using namespace vidmine;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing files, unreadable corpora and malformed inputs exit 2; only failures
// inside the algorithms themselves exit 1.
template <typename Fn>
auto io_checked(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<unsigned long long> rng_seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--set", opts.sets, "override one config key as key=value (repeatable)");
    cmd->add_option("--rng-seed", opts.rng_seed, "override the rng_seed config key");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware count)");
}

Settings load_settings(const CommonOpts& opts) {
    try {
        ConfigMap map;
        if (!opts.config_path.empty()) map = ConfigMap::parse_file(opts.config_path);
        for (const std::string& s : opts.sets) {
            std::size_t eq = s.find('=');
            if (eq == std::string::npos || eq == 0)
                throw UsageError("--set expects key=value, got '" + s + "'");
            map.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (opts.rng_seed) map.set("rng_seed", std::to_string(*opts.rng_seed));
        if (opts.threads) map.set("threads", std::to_string(*opts.threads));
        return settings_from_config(map);
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

int cmd_simulate(const CommonOpts& opts, const std::string& out_dir, bool force) {
    Settings settings = load_settings(opts);
    fs::path dir = out_dir;
    if (fs::exists(dir / "manifest.json") && !force)
        throw UsageError(out_dir + " already holds a corpus (use --force to replace)");
    CorpusManifest manifest = io_checked([&] { return generate_world(settings.world, dir); });
    std::cout << "corpus written to " << dir.string() << "\n"
              << "videos: " << manifest.videos.size() << " (" << manifest.n_classes
              << " classes)\n"
              << "test frames: " << manifest.test_frames << "\n";
    return 0;
}

int cmd_bootstrap(const CommonOpts& opts, const std::string& corpus_dir,
                  const std::string& state_path) {
    Settings settings = load_settings(opts);
    CorpusHandle corpus = io_checked([&] { return open_corpus(corpus_dir); });
    PipelineState state = bootstrap(corpus, settings);
    save_state(state, state_path);
    std::cout << "negative pool: " << state.negatives.size() << " examples\n";
    for (const auto& [c, insts] : state.positives)
        std::cout << "class " << c << ": " << insts.size() << " seed exemplars\n";
    std::cout << "state written to " << state_path << "\n";
    return 0;
}

int cmd_run(const CommonOpts& opts, const std::string& corpus_dir, const std::string& state_path,
            int iterations, const std::string& report_path, bool train_bbox) {
    Settings settings = load_settings(opts);
    CorpusHandle corpus = io_checked([&] { return open_corpus(corpus_dir); });
    PipelineState state = io_checked([&] { return load_state(state_path); });

    if (iterations < 0) iterations = settings.n_iterations;
    int n_videos = static_cast<int>(corpus.manifest.videos.size());
    int vpi = settings.videos_per_iteration > 0
                  ? settings.videos_per_iteration
                  : std::max(1, n_videos / std::max(1, settings.n_iterations));

    std::vector<ReportRow> rows;
    EvalSet eval;
    bool want_eval = !report_path.empty();
    if (want_eval) {
        eval = build_eval_set(load_test_frames(corpus.dir), settings.descriptor, settings.threads);
        if (state.iteration == 0) {
            std::map<int, double> ap = evaluate(state, eval, settings, false);
            for (const auto& [c, v] : ap)
                rows.push_back({0, c, v, static_cast<int>(state.positives.at(c).size()), 0});
        }
    }

    for (int i = 0; i < iterations; ++i) {
        std::vector<int> batch = iteration_batch(n_videos, vpi, state.iteration);
        IterationReport report = run_iteration(state, corpus, batch, settings);
        std::cout << "iteration " << report.iteration << ":";
        for (const ClassIterationStats& s : report.classes)
            std::cout << " class " << s.class_id << " +" << s.instances_added << " (pool "
                      << s.pool_size << ")";
        std::cout << "\n";
        for (const std::string& note : report.notes) std::cerr << "  note: " << note << "\n";

        if (want_eval) {
            std::map<int, double> ap = evaluate(state, eval, settings, false);
            for (const ClassIterationStats& s : report.classes)
                rows.push_back({report.iteration, s.class_id, ap.at(s.class_id), s.pool_size,
                                s.videos_mined});
        }
    }

    if (train_bbox) {
        train_regressor_stage(state, corpus, settings);
        std::cout << "box regressors trained for " << state.regressors.size() << " classes\n";
    }

    save_state(state, state_path);
    std::cout << "state written to " << state_path << "\n";
    if (want_eval) {
        write_report_csv(report_path, rows);
        std::cout << "report written to " << report_path << "\n";
    }
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& corpus_dir, const std::string& state_path,
             bool use_bbox) {
    Settings settings = load_settings(opts);
    CorpusHandle corpus = io_checked([&] { return open_corpus(corpus_dir); });
    PipelineState state = io_checked([&] { return load_state(state_path); });
    std::vector<TestFrame> frames = io_checked([&] { return load_test_frames(corpus.dir); });
    if (frames.empty()) throw UsageError("corpus has no test frames");
    EvalSet eval = build_eval_set(frames, settings.descriptor, settings.threads);
    std::map<int, double> ap = evaluate(state, eval, settings, use_bbox);
    double sum = 0.0;
    char buf[32];
    for (const auto& [c, v] : ap) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        std::cout << "class " << c << " ap " << buf << "\n";
        sum += v;
    }
    if (!ap.empty()) {
        std::snprintf(buf, sizeof(buf), "%.6f", sum / static_cast<double>(ap.size()));
        std::cout << "mean ap " << buf << "\n";
    }
    return 0;
}

int cmd_calibrate_gist(const CommonOpts& opts, const std::string& corpus_dir, int sample) {
    Settings settings = load_settings(opts);
    CorpusHandle corpus = io_checked([&] { return open_corpus(corpus_dir); });
    sample = std::clamp(sample, 1, static_cast<int>(corpus.manifest.videos.size()));

    std::vector<double> distances;
    for (int i = 0; i < sample; ++i) {
        VideoClip clip = load_video(corpus.dir, corpus.manifest.videos[i]);
        FrameDescriptor prev;
        for (std::size_t f = 0; f < clip.frames.size(); ++f) {
            FrameDescriptor desc = frame_descriptor(clip.frames[f].image, settings.descriptor);
            if (f > 0) distances.push_back(descriptor_distance(desc, prev));
            prev = std::move(desc);
        }
    }
    if (distances.empty()) throw std::runtime_error("sampled videos have no frame pairs");
    std::sort(distances.begin(), distances.end());
    auto quantile = [&distances](double q) {
        double pos = q * static_cast<double>(distances.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, distances.size() - 1);
        return distances[lo] + (pos - lo) * (distances[hi] - distances[lo]);
    };
    double mean = 0.0;
    for (double d : distances) mean += d;
    mean /= static_cast<double>(distances.size());

    char buf[32];
    std::cout << "videos sampled: " << sample << "\n"
              << "consecutive-frame distances: " << distances.size() << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", mean);
    std::cout << "mean " << buf << "\n";
    for (double q : {0.10, 0.25, 0.50, 0.75, 0.90}) {
        std::snprintf(buf, sizeof(buf), "p%02d %.6f", static_cast<int>(q * 100), quantile(q));
        std::cout << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.6f", quantile(0.50));
    std::cout << "suggested_gist_threshold=" << buf << "\n";
    return 0;
}

int cmd_report(const std::string& csv_path, const std::string& out_dir) {
    std::vector<ReportRow> rows = io_checked([&] { return read_report_csv(csv_path); });

    std::map<int, std::vector<std::pair<int, double>>> series;  // class -> (iteration, ap)
    std::map<int, std::pair<double, int>> mean_acc;             // iteration -> (sum, count)
    for (const ReportRow& r : rows) {
        series[r.class_id].push_back({r.iteration, r.ap});
        mean_acc[r.iteration].first += r.ap;
        mean_acc[r.iteration].second += 1;
    }

    fs::path dir = out_dir;
    io_checked([&] { fs::create_directories(dir); return 0; });
    auto write_series = [&](const fs::path& path, const std::vector<std::pair<int, double>>& pts) {
        std::ofstream out(path);
        if (!out) throw UsageError("cannot write " + path.string());
        out << "# iteration ap\n";
        char line[64];
        for (const auto& [it, ap] : pts) {
            std::snprintf(line, sizeof(line), "%d %.6f\n", it, ap);
            out << line;
        }
    };
    for (const auto& [c, pts] : series)
        write_series(dir / ("ap_class_" + std::to_string(c) + ".dat"), pts);
    std::vector<std::pair<int, double>> mean_pts;
    for (const auto& [it, acc] : mean_acc)
        mean_pts.push_back({it, acc.first / static_cast<double>(acc.second)});
    write_series(dir / "ap_mean.dat", mean_pts);

    std::cout << "iteration  class  ap        pool  videos_mined\n";
    char buf[96];
    for (const ReportRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%9d  %5d  %.6f  %4d  %12d", r.iteration, r.class_id,
                      r.ap, r.pool_size, r.videos_mined);
        std::cout << buf << "\n";
    }
    std::cout << "series written to " << dir.string() << " (" << series.size()
              << " classes + mean)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bootstraps object detectors from two exemplars by mining synthetic videos"};
    app.require_subcommand(1);
    CommonOpts opts;

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic video corpus");
    std::string out_dir;
    bool force = false;
    add_common(simulate, opts);
    simulate->add_option("--out", out_dir, "corpus output directory")->required();
    simulate->add_flag("--force", force, "replace an existing corpus");

    auto* boot = app.add_subcommand("bootstrap", "select seeds and train exemplar detectors");
    std::string corpus_dir, state_path;
    add_common(boot, opts);
    boot->add_option("--corpus", corpus_dir, "corpus directory")->required();
    boot->add_option("--state", state_path, "state archive to write")->required();

    auto* run = app.add_subcommand("run", "mine videos and retrain iteratively");
    int iterations = -1;
    std::string report_path;
    bool train_bbox = false;
    add_common(run, opts);
    run->add_option("--corpus", corpus_dir, "corpus directory")->required();
    run->add_option("--state", state_path, "state archive to update")->required();
    run->add_option("--iterations", iterations, "iterations to run (default: n_iterations)");
    run->add_option("--report", report_path, "write per-iteration CSV report here");
    run->add_flag("--bbox", train_bbox, "fit box regressors after the last iteration");

    auto* eval = app.add_subcommand("eval", "score the detectors on the test frames");
    bool use_bbox = false;
    add_common(eval, opts);
    eval->add_option("--corpus", corpus_dir, "corpus directory")->required();
    eval->add_option("--state", state_path, "state archive to read")->required();
    eval->add_flag("--bbox", use_bbox, "apply box regressors before NMS");

    auto* calibrate = app.add_subcommand("calibrate-gist",
                                         "suggest a key-frame threshold from the corpus");
    int sample = 8;
    add_common(calibrate, opts);
    calibrate->add_option("--corpus", corpus_dir, "corpus directory")->required();
    calibrate->add_option("--sample", sample, "videos to sample");

    auto* report = app.add_subcommand("report", "turn a run report CSV into plot-ready series");
    std::string csv_path, series_dir;
    report->add_option("--csv", csv_path, "report CSV written by run")->required();
    report->add_option("--out", series_dir, "directory for per-class and mean ap series")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts, out_dir, force);
        if (boot->parsed()) return cmd_bootstrap(opts, corpus_dir, state_path);
        if (run->parsed())
            return cmd_run(opts, corpus_dir, state_path, iterations, report_path, train_bbox);
        if (eval->parsed()) return cmd_eval(opts, corpus_dir, state_path, use_bbox);
        if (calibrate->parsed()) return cmd_calibrate_gist(opts, corpus_dir, sample);
        if (report->parsed()) return cmd_report(csv_path, series_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
