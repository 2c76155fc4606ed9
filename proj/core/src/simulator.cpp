#include "vidmine/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fs = std::filesystem;

namespace vidmine {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream bases keep every artifact on its own rng stream, so a change in one
// draw sequence never shifts another.
constexpr std::uint64_t kVideoStream = 0x10000000ull;
constexpr std::uint64_t kNoisyStream = 0x20000000ull;
constexpr std::uint64_t kSeedStream = 0x30000000ull;
constexpr std::uint64_t kBgStream = 0x40000000ull;
constexpr std::uint64_t kOtherStream = 0x50000000ull;
constexpr std::uint64_t kTestStream = 0x60000000ull;
constexpr std::uint64_t kVideoPropStream = 0x80000000ull;
constexpr std::uint64_t kTestPropStream = 0x90000000ull;

struct Rgb {
    double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    double c = v * s;
    double hp = h * 6.0;
    double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    double m = v - c;
    return {r + m, g + m, b + m};
}

double fract(double x) { return x - std::floor(x); }

// Outline vertices in the unit frame for the polygon and star families.
std::vector<std::pair<double, double>> shape_vertices(const ShapeStyle& style) {
    std::vector<std::pair<double, double>> verts;
    if (style.family == 1) return verts;
    int m = style.family == 2 ? style.points * 2 : style.points;
    double step = 2.0 * kPi / m;
    for (int i = 0; i < m; ++i) {
        double r = 1.0;
        if (style.family == 2 && (i % 2) == 1) r = style.inner_frac;
        double a = kPi / 2.0 + i * step;
        verts.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    return verts;
}

// Boundary radius of a star-convex outline along direction phi. The outline
// is the closed polygon over shape_vertices.
double boundary_radius(const std::vector<std::pair<double, double>>& verts, double phi) {
    int m = static_cast<int>(verts.size());
    double step = 2.0 * kPi / m;
    double t = (phi - kPi / 2.0) / step;
    int i = static_cast<int>(std::floor(t));
    i = ((i % m) + m) % m;
    auto [x1, y1] = verts[i];
    auto [x2, y2] = verts[(i + 1) % m];
    double dx = std::cos(phi), dy = std::sin(phi);
    double denom = dx * (y2 - y1) - dy * (x2 - x1);
    if (std::abs(denom) < 1e-12) return std::hypot(x1, y1);
    return (x1 * y2 - x2 * y1) / denom;
}

bool inside_shape(const ShapeStyle& style, const std::vector<std::pair<double, double>>& verts,
                  double u, double v) {
    if (style.family == 1) {
        double a = style.aspect;
        return u * u / a + v * v * a <= 1.0;
    }
    double r = std::hypot(u, v);
    if (r < 1e-9) return true;
    return r <= boundary_radius(verts, std::atan2(v, u));
}

BoundingBox intersect_frame(const BoundingBox& box, int width, int height) {
    double l = std::max(0.0, box.left());
    double r = std::min(static_cast<double>(width), box.right());
    double t = std::max(0.0, box.top());
    double b = std::min(static_cast<double>(height), box.bottom());
    BoundingBox out;
    out.w = std::max(0.0, r - l);
    out.h = std::max(0.0, b - t);
    out.cx = (l + r) / 2.0;
    out.cy = (t + b) / 2.0;
    return out;
}

struct Track {
    ObjectInstance obj;
    double vx = 0.0, vy = 0.0;
    double base_radius = 10.0;
    double log_scale = 0.0;
};

// Draw order inside make_track is part of the corpus format: reordering the
// rng pulls changes every video.
Track make_track(const WorldConfig& cfg, int class_id, Rng& rng) {
    Track t;
    t.obj.class_id = class_id;
    double m = 0.19 * std::min(cfg.image_width, cfg.image_height);
    t.obj.cx = rng.uniform(m, cfg.image_width - m);
    t.obj.cy = rng.uniform(m, cfg.image_height - m);
    double angle = rng.uniform(0.0, 2.0 * kPi);
    double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    t.vx = speed * std::cos(angle);
    t.vy = speed * std::sin(angle);
    t.base_radius = rng.uniform(cfg.base_radius_min, cfg.base_radius_max);
    t.obj.radius = t.base_radius;
    t.obj.rotation = rng.uniform(0.0, 2.0 * kPi);
    t.obj.hue_shift = rng.gaussian() * cfg.hue_jitter;
    t.obj.brightness = rng.uniform(cfg.brightness_min, cfg.brightness_max);
    t.obj.sat_scale = rng.uniform(1.0 - cfg.sat_jitter, 1.0 + cfg.sat_jitter);
    t.obj.freq_scale = rng.uniform(1.0 - cfg.freq_jitter, 1.0 + cfg.freq_jitter);
    t.obj.cored = rng.uniform() < cfg.core_fraction;
    t.obj.texture_phase = rng.uniform(0.0, 2.0 * kPi);
    return t;
}

void advance_track(const WorldConfig& cfg, Track& t, Rng& rng) {
    double m = 0.19 * std::min(cfg.image_width, cfg.image_height);
    t.obj.cx += t.vx;
    t.obj.cy += t.vy;
    if (t.obj.cx < m) { t.obj.cx = 2 * m - t.obj.cx; t.vx = -t.vx; }
    if (t.obj.cx > cfg.image_width - m) { t.obj.cx = 2 * (cfg.image_width - m) - t.obj.cx; t.vx = -t.vx; }
    if (t.obj.cy < m) { t.obj.cy = 2 * m - t.obj.cy; t.vy = -t.vy; }
    if (t.obj.cy > cfg.image_height - m) { t.obj.cy = 2 * (cfg.image_height - m) - t.obj.cy; t.vy = -t.vy; }
    t.obj.rotation += rng.gaussian() * cfg.rotation_drift;
    t.log_scale = std::clamp(t.log_scale + rng.gaussian() * cfg.scale_drift,
                             std::log(0.78), std::log(1.32));
    t.obj.radius = t.base_radius * std::exp(t.log_scale);
}

std::vector<GroundTruthBox> annotate(const WorldConfig& cfg, const std::vector<Track>& tracks,
                                     int frame_id) {
    std::vector<GroundTruthBox> out;
    for (const Track& t : tracks) {
        BoundingBox b = object_bounds(class_style(cfg, t.obj.class_id), t.obj);
        b = intersect_frame(b, cfg.image_width, cfg.image_height);
        if (b.w < 3.0 || b.h < 3.0) continue;
        out.push_back({b, t.obj.class_id, frame_id});
    }
    return out;
}

}  // namespace

WorldConfig::WorldConfig() {
    video_proposals.jitter_per_box = 10;
    video_proposals.jitter_center_frac = 0.06;
    video_proposals.jitter_scale_sigma = 0.10;
    video_proposals.random_count = 25;
    video_proposals.grid = false;

    // The test grid is deliberately dense: detection quality should be bounded
    // by the detector, not by how many well-aligned boxes the grid happens to
    // offer for each object size.
    test_proposals.jitter_per_box = 0;
    test_proposals.random_count = 40;
    test_proposals.grid = true;
    test_proposals.grid_stride_frac = 1.0 / 16.0;
    test_proposals.grid_scale_fracs = {0.20, 0.25, 0.31, 0.39, 0.49, 0.61};
    test_proposals.grid_aspects = {0.7, 1.0, 1.45};
}

ShapeStyle class_style(const WorldConfig& cfg, int class_id) {
    ShapeStyle s;
    // Distractor families are offset by two: a distractor halfway between two
    // targets on the hue wheel then shares a family with neither neighbour.
    s.family = (class_id < cfg.n_classes ? class_id : class_id + 2) % 3;
    int variant = class_id / 3;
    if (s.family == 0) {
        // Pentagons and up: their higher rotational symmetry keeps the
        // appearance stable across per-video rotation offsets.
        s.points = 5 + variant % 3;
    } else if (s.family == 1) {
        s.aspect = 1.3 + 0.25 * (variant % 3);
    } else {
        s.points = 5 + variant % 2;
        s.inner_frac = 0.52;
    }
    // Target classes sit evenly on the hue wheel; distractor classes sit
    // halfway between neighbouring targets, so they stay confusable without
    // overlapping any target's jitter band.
    if (class_id < cfg.n_classes) {
        s.hue = fract(0.04 + static_cast<double>(class_id) / cfg.n_classes);
    } else {
        int d = class_id - cfg.n_classes;
        int dn = std::max(1, cfg.distractor_classes);
        s.hue = fract(0.04 + (static_cast<double>(d) + 0.5) / dn);
    }
    s.saturation = 0.72 + 0.06 * (class_id % 3);
    s.value = 0.74 + 0.05 * (class_id % 2);
    s.texture_freq = 1.6 + 0.6 * (class_id % 4);
    s.texture_amp = 0.32;
    s.texture_angle = fract(class_id * 0.23) * kPi;
    return s;
}

BoundingBox object_bounds(const ShapeStyle& style, const ObjectInstance& obj) {
    double c = std::cos(obj.rotation), s = std::sin(obj.rotation);
    BoundingBox out;
    if (style.family == 1) {
        double sa = std::sqrt(style.aspect), sb = 1.0 / std::sqrt(style.aspect);
        double hw = obj.radius * std::sqrt(sa * sa * c * c + sb * sb * s * s);
        double hh = obj.radius * std::sqrt(sa * sa * s * s + sb * sb * c * c);
        out = {obj.cx, obj.cy, 2 * hw, 2 * hh};
        return out;
    }
    auto verts = shape_vertices(style);
    double lx = 1e30, hx = -1e30, ly = 1e30, hy = -1e30;
    for (auto [u, v] : verts) {
        double x = obj.cx + obj.radius * (c * u - s * v);
        double y = obj.cy + obj.radius * (s * u + c * v);
        lx = std::min(lx, x);
        hx = std::max(hx, x);
        ly = std::min(ly, y);
        hy = std::max(hy, y);
    }
    out = {(lx + hx) / 2, (ly + hy) / 2, hx - lx, hy - ly};
    return out;
}

BackgroundModel sample_background(const WorldConfig& cfg, Rng& rng) {
    BackgroundModel bg;
    Rgb base = hsv_to_rgb(rng.uniform(0.0, 1.0), rng.uniform(0.05, 0.22), rng.uniform(0.35, 0.60));
    bg.base_r = base.r;
    bg.base_g = base.g;
    bg.base_b = base.b;
    for (int k = 0; k < 3; ++k) {
        BackgroundModel::Wave w;
        w.fx = rng.uniform(-2.5, 2.5);
        w.fy = rng.uniform(-2.5, 2.5);
        w.phase = rng.uniform(0.0, 2.0 * kPi);
        w.amp = rng.uniform(0.03, 0.08);
        bg.waves.push_back(w);
    }
    int n_rects = 3 + rng.below(5);
    for (int k = 0; k < n_rects; ++k) {
        BackgroundModel::Rect r;
        r.cx = rng.uniform(0.0, cfg.image_width);
        r.cy = rng.uniform(0.0, cfg.image_height);
        r.w = rng.uniform(8.0, 26.0);
        r.h = rng.uniform(8.0, 26.0);
        Rgb col = hsv_to_rgb(rng.uniform(0.0, 1.0), rng.uniform(0.05, 0.30), rng.uniform(0.30, 0.68));
        r.r = col.r;
        r.g = col.g;
        r.b = col.b;
        bg.rects.push_back(r);
    }
    return bg;
}

ImageRaster render_frame(const WorldConfig& cfg, const BackgroundModel& background,
                         double camera_dx, double camera_dy,
                         const std::vector<ObjectInstance>& objects) {
    ImageRaster img(cfg.image_width, cfg.image_height);

    struct PaintedObject {
        const ObjectInstance* obj;
        ShapeStyle style;
        std::vector<std::pair<double, double>> verts;
        Rgb base;
        double cos_r, sin_r, tex_cx, tex_cy;
        BoundingBox bounds;
    };
    std::vector<PaintedObject> painted;
    for (const ObjectInstance& o : objects) {
        PaintedObject p;
        p.obj = &o;
        p.style = class_style(cfg, o.class_id);
        p.style.saturation = std::clamp(p.style.saturation * o.sat_scale, 0.0, 1.0);
        p.style.texture_freq *= o.freq_scale;
        p.verts = shape_vertices(p.style);
        p.base = hsv_to_rgb(p.style.hue + o.hue_shift, p.style.saturation, p.style.value);
        p.cos_r = std::cos(o.rotation);
        p.sin_r = std::sin(o.rotation);
        p.tex_cx = std::cos(p.style.texture_angle);
        p.tex_cy = std::sin(p.style.texture_angle);
        p.bounds = object_bounds(p.style, o);
        painted.push_back(std::move(p));
    }

    for (int y = 0; y < cfg.image_height; ++y) {
        for (int x = 0; x < cfg.image_width; ++x) {
            double px = x + 0.5, py = y + 0.5;
            double sx = px + camera_dx, sy = py + camera_dy;
            double off = 0.0;
            for (const auto& w : background.waves)
                off += w.amp * std::sin(2.0 * kPi * (w.fx * sx / cfg.image_width +
                                                     w.fy * sy / cfg.image_height) +
                                        w.phase);
            double r = background.base_r + off;
            double g = background.base_g + off;
            double b = background.base_b + off;
            for (const auto& rect : background.rects) {
                if (std::abs(sx - rect.cx) <= rect.w / 2 && std::abs(sy - rect.cy) <= rect.h / 2) {
                    r = rect.r + off * 0.5;
                    g = rect.g + off * 0.5;
                    b = rect.b + off * 0.5;
                }
            }
            for (const PaintedObject& p : painted) {
                const ObjectInstance& o = *p.obj;
                if (px < p.bounds.left() || px > p.bounds.right() || py < p.bounds.top() ||
                    py > p.bounds.bottom())
                    continue;
                double dx = px - o.cx, dy = py - o.cy;
                double u = (p.cos_r * dx + p.sin_r * dy) / o.radius;
                double v = (-p.sin_r * dx + p.cos_r * dy) / o.radius;
                if (!inside_shape(p.style, p.verts, u, v)) continue;
                double tex = 1.0 + p.style.texture_amp *
                                       std::sin(2.0 * kPi * p.style.texture_freq *
                                                    (u * p.tex_cx + v * p.tex_cy) +
                                                o.texture_phase);
                // Pronounced rim falloff: the outline region reads darker than
                // the body, so a box that spans the full object sees a
                // brightness ring that an interior crop lacks.
                double shade = 1.0 - 0.25 * (u * u + v * v);
                double gain = o.brightness * tex * shade;
                if (o.cored &&
                    inside_shape(p.style, p.verts, u / cfg.core_scale, v / cfg.core_scale))
                    gain *= cfg.core_shade;
                r = p.base.r * gain;
                g = p.base.g * gain;
                b = p.base.b * gain;
            }
            img.at(x, y, 0) = std::clamp(r, 0.0, 1.0);
            img.at(x, y, 1) = std::clamp(g, 0.0, 1.0);
            img.at(x, y, 2) = std::clamp(b, 0.0, 1.0);
        }
    }
    return img;
}

std::vector<VideoEntry> video_plan(const WorldConfig& cfg) {
    int per_class_noisy = static_cast<int>(std::lround(cfg.noisy_fraction * cfg.videos_per_class));
    std::vector<std::vector<bool>> noisy(cfg.n_classes,
                                         std::vector<bool>(cfg.videos_per_class, false));
    for (int c = 0; c < cfg.n_classes; ++c) {
        Rng rng = Rng::derive(cfg.rng_seed, kNoisyStream + c);
        std::vector<int> perm = rng.permutation(cfg.videos_per_class);
        for (int j = 0; j < per_class_noisy; ++j) noisy[c][perm[j]] = true;
    }
    std::vector<VideoEntry> plan;
    int total = cfg.n_classes * cfg.videos_per_class;
    for (int i = 0; i < total; ++i) {
        VideoEntry e;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "v%04d", i);
        e.id = buf;
        e.class_id = i % cfg.n_classes;
        e.noisy = noisy[e.class_id][i / cfg.n_classes];
        e.frame_count = cfg.frames_per_video;
        plan.push_back(std::move(e));
    }
    return plan;
}

VideoClip render_video(const WorldConfig& cfg, int video_index) {
    std::vector<VideoEntry> plan = video_plan(cfg);
    const VideoEntry& entry = plan.at(video_index);

    Rng rng = Rng::derive(cfg.rng_seed, kVideoStream + video_index);
    BackgroundModel bg = sample_background(cfg, rng);

    std::vector<Track> tracks;
    int n_distractors = rng.below(cfg.max_distractors + 1);
    for (int k = 0; k < n_distractors; ++k) {
        int cls = cfg.n_classes + rng.below(std::max(1, cfg.distractor_classes));
        tracks.push_back(make_track(cfg, cls, rng));
    }
    if (!entry.noisy) tracks.push_back(make_track(cfg, entry.class_id, rng));

    VideoClip clip;
    clip.video_id = entry.id;
    clip.class_id = entry.class_id;
    clip.noisy = entry.noisy;

    double ox = 0.0, oy = 0.0;
    for (int t = 0; t < cfg.frames_per_video; ++t) {
        std::vector<ObjectInstance> objects;
        for (const Track& tr : tracks) objects.push_back(tr.obj);
        clip.frames.push_back({t, render_frame(cfg, bg, ox, oy, objects)});

        std::vector<GroundTruthBox> boxes = annotate(cfg, tracks, t);
        clip.annotations.insert(clip.annotations.end(), boxes.begin(), boxes.end());

        std::vector<BoundingBox> refs;
        for (const GroundTruthBox& gbox : boxes) refs.push_back(gbox.box);
        Rng prop_rng = Rng::derive(cfg.rng_seed, kVideoPropStream + video_index * 4096ull + t);
        clip.proposals[t] = generate_proposals(cfg.image_width, cfg.image_height, refs,
                                               cfg.video_proposals, prop_rng);

        ox = std::clamp(ox + rng.gaussian() * cfg.camera_jitter, -3.0, 3.0);
        oy = std::clamp(oy + rng.gaussian() * cfg.camera_jitter, -3.0, 3.0);
        for (Track& tr : tracks) advance_track(cfg, tr, rng);
    }
    return clip;
}

std::vector<SeedSource> render_seed_sources(const WorldConfig& cfg, int class_id) {
    std::vector<SeedSource> out;
    for (int j = 0; j < cfg.seed_sources_per_class; ++j) {
        Rng rng = Rng::derive(cfg.rng_seed, kSeedStream + class_id * 4096ull + j);
        BackgroundModel bg = sample_background(cfg, rng);
        // Seed captures are tame: narrowed appearance draws, never cored.
        ObjectInstance obj;
        obj.class_id = class_id;
        obj.cx = rng.uniform(0.38, 0.62) * cfg.image_width;
        obj.cy = rng.uniform(0.38, 0.62) * cfg.image_height;
        obj.radius = rng.uniform(12.0, 16.0);
        obj.rotation = rng.uniform(0.0, 2.0 * kPi);
        obj.hue_shift = rng.gaussian() * cfg.hue_jitter * 0.5;
        obj.brightness = rng.uniform(0.95, 1.05);
        obj.sat_scale = rng.uniform(1.0 - cfg.sat_jitter * 0.5, 1.0 + cfg.sat_jitter * 0.5);
        obj.freq_scale = rng.uniform(1.0 - cfg.freq_jitter * 0.5, 1.0 + cfg.freq_jitter * 0.5);
        obj.texture_phase = rng.uniform(0.0, 2.0 * kPi);
        SeedSource s;
        s.class_id = class_id;
        s.image = render_frame(cfg, bg, 0.0, 0.0, {obj});
        s.box = intersect_frame(object_bounds(class_style(cfg, class_id), obj), cfg.image_width,
                                cfg.image_height);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ImageRaster> render_backgrounds(const WorldConfig& cfg) {
    std::vector<ImageRaster> out;
    for (int j = 0; j < cfg.background_frames; ++j) {
        Rng rng = Rng::derive(cfg.rng_seed, kBgStream + j);
        BackgroundModel bg = sample_background(cfg, rng);
        out.push_back(render_frame(cfg, bg, 0.0, 0.0, {}));
    }
    return out;
}

std::vector<SeedSource> render_other_crops(const WorldConfig& cfg) {
    std::vector<SeedSource> out;
    for (int j = 0; j < cfg.other_crops; ++j) {
        Rng rng = Rng::derive(cfg.rng_seed, kOtherStream + j);
        int cls = cfg.n_classes + j % std::max(1, cfg.distractor_classes);
        BackgroundModel bg = sample_background(cfg, rng);
        ObjectInstance obj;
        obj.class_id = cls;
        obj.cx = rng.uniform(0.30, 0.70) * cfg.image_width;
        obj.cy = rng.uniform(0.30, 0.70) * cfg.image_height;
        obj.radius = rng.uniform(cfg.base_radius_min, cfg.base_radius_max);
        obj.rotation = rng.uniform(0.0, 2.0 * kPi);
        obj.hue_shift = rng.gaussian() * cfg.hue_jitter;
        obj.brightness = rng.uniform(cfg.brightness_min, cfg.brightness_max);
        obj.sat_scale = rng.uniform(1.0 - cfg.sat_jitter, 1.0 + cfg.sat_jitter);
        obj.freq_scale = rng.uniform(1.0 - cfg.freq_jitter, 1.0 + cfg.freq_jitter);
        obj.cored = rng.uniform() < cfg.core_fraction;
        obj.texture_phase = rng.uniform(0.0, 2.0 * kPi);
        SeedSource s;
        s.class_id = cls;
        s.image = render_frame(cfg, bg, 0.0, 0.0, {obj});
        s.box = intersect_frame(object_bounds(class_style(cfg, cls), obj), cfg.image_width,
                                cfg.image_height);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<TestFrame> render_test_frames(const WorldConfig& cfg) {
    std::vector<TestFrame> out;
    for (int j = 0; j < cfg.test_frames; ++j) {
        Rng rng = Rng::derive(cfg.rng_seed, kTestStream + j);
        BackgroundModel bg = sample_background(cfg, rng);

        auto sample_object = [&](int cls) {
            ObjectInstance obj;
            obj.class_id = cls;
            obj.cx = rng.uniform(0.18, 0.82) * cfg.image_width;
            obj.cy = rng.uniform(0.18, 0.82) * cfg.image_height;
            obj.radius = rng.uniform(9.0, 21.0);
            obj.rotation = rng.uniform(0.0, 2.0 * kPi);
            obj.hue_shift = rng.gaussian() * cfg.hue_jitter;
            obj.brightness = rng.uniform(cfg.brightness_min, cfg.brightness_max);
            obj.sat_scale = rng.uniform(1.0 - cfg.sat_jitter, 1.0 + cfg.sat_jitter);
            obj.freq_scale = rng.uniform(1.0 - cfg.freq_jitter, 1.0 + cfg.freq_jitter);
            obj.cored = rng.uniform() < cfg.core_fraction;
            obj.texture_phase = rng.uniform(0.0, 2.0 * kPi);
            return obj;
        };

        std::vector<ObjectInstance> objects;
        int n_distractors = rng.below(cfg.test_max_distractors + 1);
        for (int k = 0; k < n_distractors; ++k)
            objects.push_back(sample_object(cfg.n_classes + rng.below(std::max(1, cfg.distractor_classes))));

        std::vector<BoundingBox> target_boxes;
        int n_targets = 1 + rng.below(cfg.test_max_targets);
        for (int k = 0; k < n_targets; ++k) {
            ObjectInstance obj = sample_object(rng.below(cfg.n_classes));
            // A few retries keep targets from stacking on top of each other.
            for (int attempt = 0; attempt < 25; ++attempt) {
                BoundingBox b = object_bounds(class_style(cfg, obj.class_id), obj);
                bool clash = false;
                for (const BoundingBox& prev : target_boxes)
                    if (iou(b, prev) > 0.3) clash = true;
                if (!clash) break;
                int cls = obj.class_id;
                obj = sample_object(cls);
            }
            target_boxes.push_back(object_bounds(class_style(cfg, obj.class_id), obj));
            objects.push_back(obj);
        }

        TestFrame frame;
        frame.frame_id = j;
        frame.image = render_frame(cfg, bg, 0.0, 0.0, objects);
        for (const ObjectInstance& obj : objects) {
            BoundingBox b = intersect_frame(object_bounds(class_style(cfg, obj.class_id), obj),
                                            cfg.image_width, cfg.image_height);
            if (b.w < 3.0 || b.h < 3.0) continue;
            frame.annotations.push_back({b, obj.class_id, j});
        }
        Rng prop_rng = Rng::derive(cfg.rng_seed, kTestPropStream + j);
        frame.proposals = generate_proposals(cfg.image_width, cfg.image_height, {},
                                             cfg.test_proposals, prop_rng);
        out.push_back(std::move(frame));
    }
    return out;
}

CorpusManifest generate_world(const WorldConfig& cfg, const fs::path& corpus_dir) {
    fs::create_directories(corpus_dir);

    CorpusManifest manifest;
    manifest.rng_seed = cfg.rng_seed;
    manifest.image_width = cfg.image_width;
    manifest.image_height = cfg.image_height;
    manifest.n_classes = cfg.n_classes;
    manifest.distractor_classes = cfg.distractor_classes;
    manifest.seed_sources_per_class = cfg.seed_sources_per_class;
    manifest.background_frames = cfg.background_frames;
    manifest.other_crops = cfg.other_crops;
    manifest.test_frames = cfg.test_frames;
    manifest.videos = video_plan(cfg);

    for (std::size_t i = 0; i < manifest.videos.size(); ++i)
        write_video(corpus_dir, render_video(cfg, static_cast<int>(i)));
    for (int c = 0; c < cfg.n_classes; ++c)
        write_seed_sources(corpus_dir, c, render_seed_sources(cfg, c));
    write_backgrounds(corpus_dir, render_backgrounds(cfg));
    write_other_crops(corpus_dir, render_other_crops(cfg));
    write_test_frames(corpus_dir, render_test_frames(cfg));
    write_manifest(corpus_dir, manifest);
    return manifest;
}

}  // namespace vidmine
