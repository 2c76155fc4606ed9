#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vidmine/corpus.hpp"
#include "vidmine/proposals.hpp"

namespace vidmine {

// Everything that defines a synthetic world. Two runs with the same config
// produce byte-identical corpora.
struct WorldConfig {
    std::uint64_t rng_seed = 42;
    int image_width = 96;
    int image_height = 96;
    int n_classes = 3;
    int distractor_classes = 3;
    int videos_per_class = 120;
    int frames_per_video = 40;
    double noisy_fraction = 0.3;
    int max_distractors = 3;
    int seed_sources_per_class = 24;
    int background_frames = 24;
    int other_crops = 300;
    int test_frames = 90;
    int test_max_targets = 3;
    int test_max_distractors = 2;

    double base_radius_min = 11.0;
    double base_radius_max = 17.0;
    double speed_min = 0.8;
    double speed_max = 2.2;
    double scale_drift = 0.015;
    double rotation_drift = 0.05;
    double hue_jitter = 0.045;
    double brightness_min = 0.80;
    double brightness_max = 1.20;
    double sat_jitter = 0.10;
    double freq_jitter = 0.25;
    double camera_jitter = 0.3;

    // Fraction of instances carrying a darkened concentric core, the core's
    // size relative to the outline, and its brightness factor. Seed source
    // images only show the plain variant, so a bootstrap detector has to
    // discover the cored variant from the unlabeled videos.
    double core_fraction = 0.5;
    double core_scale = 0.55;
    double core_shade = 0.60;

    ProposalConfig video_proposals;  // jittered objects plus random boxes
    ProposalConfig test_proposals;   // sliding grid plus random boxes, no object leak

    WorldConfig();
};

// Per-class appearance recipe, a pure function of (config, class_id).
// family 0 is a regular polygon, 1 an ellipse, 2 a star.
struct ShapeStyle {
    int family = 0;
    int points = 3;
    double inner_frac = 1.0;  // star inner radius over outer
    double aspect = 1.0;      // ellipse stretch along the local x axis
    double hue = 0.0;
    double saturation = 0.8;
    double value = 0.8;
    double texture_freq = 2.0;
    double texture_amp = 0.18;
    double texture_angle = 0.0;
};

// One object with a concrete pose. Rendering paints objects in list order,
// so later entries occlude earlier ones. The appearance knobs are drawn once
// per instance and stay fixed across the frames of a video, so intra-class
// variation lives between videos, not within one.
struct ObjectInstance {
    int class_id = 0;
    double cx = 0.0;
    double cy = 0.0;
    double radius = 10.0;
    double rotation = 0.0;
    double hue_shift = 0.0;
    double brightness = 1.0;
    double sat_scale = 1.0;
    double freq_scale = 1.0;
    bool cored = false;
    double texture_phase = 0.0;
};

// Static per-video background: a muted base color with low-frequency waves
// and a handful of clutter rectangles, sampled at a camera offset per frame.
struct BackgroundModel {
    double base_r = 0.5, base_g = 0.5, base_b = 0.5;
    struct Wave {
        double fx = 0.0, fy = 0.0, phase = 0.0, amp = 0.0;
    };
    std::vector<Wave> waves;
    struct Rect {
        double cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;
        double r = 0.5, g = 0.5, b = 0.5;
    };
    std::vector<Rect> rects;
};

ShapeStyle class_style(const WorldConfig& cfg, int class_id);

/// Analytic tight bounding box of the object outline.
BoundingBox object_bounds(const ShapeStyle& style, const ObjectInstance& obj);

BackgroundModel sample_background(const WorldConfig& cfg, Rng& rng);

/// Paints background then objects at pixel centers, no anti-aliasing.
ImageRaster render_frame(const WorldConfig& cfg, const BackgroundModel& background,
                         double camera_dx, double camera_dy,
                         const std::vector<ObjectInstance>& objects);

/// The deterministic video roster: round-robin class assignment and an exact
/// round(noisy_fraction * videos_per_class) noisy picks per class.
std::vector<VideoEntry> video_plan(const WorldConfig& cfg);

/// Renders one video (frames, annotations, stored proposals) from scratch.
/// Depends only on (cfg, video_index).
VideoClip render_video(const WorldConfig& cfg, int video_index);

std::vector<SeedSource> render_seed_sources(const WorldConfig& cfg, int class_id);
std::vector<ImageRaster> render_backgrounds(const WorldConfig& cfg);
std::vector<SeedSource> render_other_crops(const WorldConfig& cfg);
std::vector<TestFrame> render_test_frames(const WorldConfig& cfg);

/// Renders the whole world and streams it to corpus_dir, one video at a
/// time so memory stays flat. Returns the manifest it wrote.
CorpusManifest generate_world(const WorldConfig& cfg, const std::filesystem::path& corpus_dir);

}  // namespace vidmine
