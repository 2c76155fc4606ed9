#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vidmine/geometry.hpp"
#include "vidmine/image.hpp"

namespace vidmine {

struct VideoFrame {
    int frame_id = 0;
    ImageRaster image;
};

// One unlabeled video plus the side information the corpus keeps for it.
// Annotations are diagnostic only; the miner never reads them.
struct VideoClip {
    std::string video_id;
    int class_id = -1;
    bool noisy = false;
    std::vector<VideoFrame> frames;
    std::vector<GroundTruthBox> annotations;
    std::map<int, std::vector<BoundingBox>> proposals;  // frame_id -> boxes
};

// Single-object frame used either as a seed-selection source (target class)
// or as an other-concept negative source (distractor class).
struct SeedSource {
    ImageRaster image;
    BoundingBox box;
    int class_id = -1;
};

struct TestFrame {
    int frame_id = 0;
    ImageRaster image;
    std::vector<GroundTruthBox> annotations;
    std::vector<BoundingBox> proposals;
};

struct VideoEntry {
    std::string id;
    int class_id = -1;
    bool noisy = false;
    int frame_count = 0;
};

struct CorpusManifest {
    int format_version = 1;
    std::uint64_t rng_seed = 0;
    int image_width = 0;
    int image_height = 0;
    int n_classes = 0;
    int distractor_classes = 0;
    int seed_sources_per_class = 0;
    int background_frames = 0;
    int other_crops = 0;
    int test_frames = 0;
    std::vector<VideoEntry> videos;
};

/// Binary 8-bit PPM (P6). Values are clamped to [0, 1] and rounded.
void write_ppm(const std::filesystem::path& path, const ImageRaster& image);
ImageRaster read_ppm(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& corpus_dir, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& corpus_dir);

void write_video(const std::filesystem::path& corpus_dir, const VideoClip& clip);
VideoClip load_video(const std::filesystem::path& corpus_dir, const VideoEntry& entry);

void write_seed_sources(const std::filesystem::path& corpus_dir, int class_id,
                        const std::vector<SeedSource>& sources);
std::vector<SeedSource> load_seed_sources(const std::filesystem::path& corpus_dir, int class_id);

void write_backgrounds(const std::filesystem::path& corpus_dir,
                       const std::vector<ImageRaster>& frames);
std::vector<ImageRaster> load_backgrounds(const std::filesystem::path& corpus_dir);

void write_other_crops(const std::filesystem::path& corpus_dir,
                       const std::vector<SeedSource>& crops);
std::vector<SeedSource> load_other_crops(const std::filesystem::path& corpus_dir);

void write_test_frames(const std::filesystem::path& corpus_dir,
                       const std::vector<TestFrame>& frames);
std::vector<TestFrame> load_test_frames(const std::filesystem::path& corpus_dir);

}  // namespace vidmine
