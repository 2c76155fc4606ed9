#include "vidmine/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fs = std::filesystem;

namespace vidmine {

namespace {

std::string frame_name(int frame_id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d.ppm", frame_id);
    return buf;
}

std::string inst_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "inst_%03d.ppm", index);
    return buf;
}

void write_annotation_file(const fs::path& path, const std::vector<GroundTruthBox>& boxes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    for (const GroundTruthBox& g : boxes)
        out << g.frame_id << ' ' << g.class_id << ' ' << g.box.cx << ' ' << g.box.cy << ' '
            << g.box.w << ' ' << g.box.h << '\n';
}

std::vector<GroundTruthBox> read_annotation_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<GroundTruthBox> boxes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        GroundTruthBox g;
        if (!(ss >> g.frame_id >> g.class_id >> g.box.cx >> g.box.cy >> g.box.w >> g.box.h))
            throw std::runtime_error("malformed annotation line in " + path.string());
        boxes.push_back(g);
    }
    return boxes;
}

void write_proposal_file(const fs::path& path,
                         const std::map<int, std::vector<BoundingBox>>& proposals) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    for (const auto& [frame_id, boxes] : proposals)
        for (const BoundingBox& b : boxes)
            out << frame_id << ' ' << b.cx << ' ' << b.cy << ' ' << b.w << ' ' << b.h << '\n';
}

std::map<int, std::vector<BoundingBox>> read_proposal_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::map<int, std::vector<BoundingBox>> proposals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int frame_id = 0;
        BoundingBox b;
        if (!(ss >> frame_id >> b.cx >> b.cy >> b.w >> b.h))
            throw std::runtime_error("malformed proposal line in " + path.string());
        proposals[frame_id].push_back(b);
    }
    return proposals;
}

// Box sidecar for single-object frames: "index class_id cx cy w h".
void write_box_file(const fs::path& path, const std::vector<SeedSource>& sources) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    for (std::size_t i = 0; i < sources.size(); ++i)
        out << i << ' ' << sources[i].class_id << ' ' << sources[i].box.cx << ' '
            << sources[i].box.cy << ' ' << sources[i].box.w << ' ' << sources[i].box.h << '\n';
}

std::vector<SeedSource> load_single_object_dir(const fs::path& dir) {
    std::ifstream in(dir / "boxes.txt");
    if (!in) throw std::runtime_error("cannot read " + (dir / "boxes.txt").string());
    std::vector<SeedSource> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int index = 0;
        SeedSource s;
        if (!(ss >> index >> s.class_id >> s.box.cx >> s.box.cy >> s.box.w >> s.box.h))
            throw std::runtime_error("malformed box line in " + (dir / "boxes.txt").string());
        s.image = read_ppm(dir / inst_name(index));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

void write_ppm(const fs::path& path, const ImageRaster& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    std::vector<unsigned char> bytes(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        double v = std::clamp(image.pixels[i], 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

ImageRaster read_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P6") throw std::runtime_error("not a P6 ppm: " + path.string());
    auto next_int = [&in, &path]() {
        // Skip whitespace and '#' comment lines between header fields.
        int c = in.get();
        while (c != EOF) {
            if (c == '#') {
                while (c != EOF && c != '\n') c = in.get();
            } else if (!std::isspace(c)) {
                in.unget();
                break;
            }
            c = in.get();
        }
        int value = 0;
        if (!(in >> value)) throw std::runtime_error("bad ppm header: " + path.string());
        return value;
    };
    int width = next_int();
    int height = next_int();
    int maxval = next_int();
    if (maxval != 255) throw std::runtime_error("unsupported ppm maxval: " + path.string());
    in.get();  // single whitespace byte after maxval
    ImageRaster image(width, height);
    std::vector<unsigned char> bytes(image.pixels.size());
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw std::runtime_error("truncated ppm: " + path.string());
    for (std::size_t i = 0; i < bytes.size(); ++i) image.pixels[i] = bytes[i] / 255.0;
    return image;
}

void write_manifest(const fs::path& corpus_dir, const CorpusManifest& manifest) {
    nlohmann::json j;
    j["format_version"] = manifest.format_version;
    j["rng_seed"] = manifest.rng_seed;
    j["image_width"] = manifest.image_width;
    j["image_height"] = manifest.image_height;
    j["n_classes"] = manifest.n_classes;
    j["distractor_classes"] = manifest.distractor_classes;
    j["seed_sources_per_class"] = manifest.seed_sources_per_class;
    j["background_frames"] = manifest.background_frames;
    j["other_crops"] = manifest.other_crops;
    j["test_frames"] = manifest.test_frames;
    j["videos"] = nlohmann::json::array();
    for (const VideoEntry& v : manifest.videos)
        j["videos"].push_back({{"id", v.id},
                               {"class_id", v.class_id},
                               {"noisy", v.noisy},
                               {"frame_count", v.frame_count}});
    std::ofstream out(corpus_dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write " + (corpus_dir / "manifest.json").string());
    out << j.dump(2) << '\n';
}

CorpusManifest read_manifest(const fs::path& corpus_dir) {
    fs::path path = corpus_dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt manifest " + path.string() + ": " + e.what());
    }
    CorpusManifest m;
    try {
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != 1)
            throw std::runtime_error("unsupported corpus format_version in " + path.string());
        m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        m.image_width = j.at("image_width").get<int>();
        m.image_height = j.at("image_height").get<int>();
        m.n_classes = j.at("n_classes").get<int>();
        m.distractor_classes = j.at("distractor_classes").get<int>();
        m.seed_sources_per_class = j.at("seed_sources_per_class").get<int>();
        m.background_frames = j.at("background_frames").get<int>();
        m.other_crops = j.at("other_crops").get<int>();
        m.test_frames = j.at("test_frames").get<int>();
        for (const auto& v : j.at("videos")) {
            VideoEntry e;
            e.id = v.at("id").get<std::string>();
            e.class_id = v.at("class_id").get<int>();
            e.noisy = v.at("noisy").get<bool>();
            e.frame_count = v.at("frame_count").get<int>();
            m.videos.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt manifest " + path.string() + ": " + e.what());
    }
    return m;
}

void write_video(const fs::path& corpus_dir, const VideoClip& clip) {
    fs::path dir = corpus_dir / "videos" / clip.video_id;
    fs::create_directories(dir);
    for (const VideoFrame& f : clip.frames) write_ppm(dir / frame_name(f.frame_id), f.image);
    write_annotation_file(dir / "annotations.txt", clip.annotations);
    write_proposal_file(dir / "proposals.txt", clip.proposals);
}

VideoClip load_video(const fs::path& corpus_dir, const VideoEntry& entry) {
    fs::path dir = corpus_dir / "videos" / entry.id;
    VideoClip clip;
    clip.video_id = entry.id;
    clip.class_id = entry.class_id;
    clip.noisy = entry.noisy;
    clip.frames.reserve(entry.frame_count);
    for (int f = 0; f < entry.frame_count; ++f)
        clip.frames.push_back({f, read_ppm(dir / frame_name(f))});
    clip.annotations = read_annotation_file(dir / "annotations.txt");
    clip.proposals = read_proposal_file(dir / "proposals.txt");
    return clip;
}

void write_seed_sources(const fs::path& corpus_dir, int class_id,
                        const std::vector<SeedSource>& sources) {
    fs::path dir = corpus_dir / "seeds" / ("class_" + std::to_string(class_id));
    fs::create_directories(dir);
    for (std::size_t i = 0; i < sources.size(); ++i)
        write_ppm(dir / inst_name(static_cast<int>(i)), sources[i].image);
    write_box_file(dir / "boxes.txt", sources);
}

std::vector<SeedSource> load_seed_sources(const fs::path& corpus_dir, int class_id) {
    return load_single_object_dir(corpus_dir / "seeds" / ("class_" + std::to_string(class_id)));
}

void write_backgrounds(const fs::path& corpus_dir, const std::vector<ImageRaster>& frames) {
    fs::path dir = corpus_dir / "backgrounds";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "bg_%03d.ppm", static_cast<int>(i));
        write_ppm(dir / buf, frames[i]);
    }
}

std::vector<ImageRaster> load_backgrounds(const fs::path& corpus_dir) {
    std::vector<ImageRaster> out;
    for (int i = 0;; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "bg_%03d.ppm", i);
        fs::path path = corpus_dir / "backgrounds" / buf;
        if (!fs::exists(path)) break;
        out.push_back(read_ppm(path));
    }
    if (out.empty()) throw std::runtime_error("no backgrounds under " + corpus_dir.string());
    return out;
}

void write_other_crops(const fs::path& corpus_dir, const std::vector<SeedSource>& crops) {
    fs::path dir = corpus_dir / "others";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < crops.size(); ++i)
        write_ppm(dir / inst_name(static_cast<int>(i)), crops[i].image);
    write_box_file(dir / "boxes.txt", crops);
}

std::vector<SeedSource> load_other_crops(const fs::path& corpus_dir) {
    return load_single_object_dir(corpus_dir / "others");
}

void write_test_frames(const fs::path& corpus_dir, const std::vector<TestFrame>& frames) {
    fs::path dir = corpus_dir / "test";
    fs::create_directories(dir);
    std::vector<GroundTruthBox> all_boxes;
    std::map<int, std::vector<BoundingBox>> all_proposals;
    for (const TestFrame& f : frames) {
        write_ppm(dir / frame_name(f.frame_id), f.image);
        all_boxes.insert(all_boxes.end(), f.annotations.begin(), f.annotations.end());
        all_proposals[f.frame_id] = f.proposals;
    }
    write_annotation_file(dir / "annotations.txt", all_boxes);
    write_proposal_file(dir / "proposals.txt", all_proposals);
}

std::vector<TestFrame> load_test_frames(const fs::path& corpus_dir) {
    fs::path dir = corpus_dir / "test";
    std::vector<GroundTruthBox> boxes = read_annotation_file(dir / "annotations.txt");
    std::map<int, std::vector<BoundingBox>> proposals = read_proposal_file(dir / "proposals.txt");
    std::vector<TestFrame> out;
    for (int f = 0;; ++f) {
        fs::path path = dir / frame_name(f);
        if (!fs::exists(path)) break;
        TestFrame frame;
        frame.frame_id = f;
        frame.image = read_ppm(path);
        for (const GroundTruthBox& g : boxes)
            if (g.frame_id == f) frame.annotations.push_back(g);
        auto it = proposals.find(f);
        if (it != proposals.end()) frame.proposals = it->second;
        out.push_back(std::move(frame));
    }
    if (out.empty()) throw std::runtime_error("no test frames under " + corpus_dir.string());
    return out;
}

}  // namespace vidmine
