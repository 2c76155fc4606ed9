#include "vidmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vidmine {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt3 = 1.73205080756887729353;
constexpr double kSqrt6 = 2.44948974968169879310;

struct Plane {
    int size = 0;
    std::vector<double> v;  // size * size

    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * size + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * size + x]; }
};

// Unsigned orientation bin in [0, bins) for gradient (gx, gy).
int orientation_bin(double gx, double gy, int bins) {
    double theta = std::atan2(gy, gx);
    if (theta < 0.0) theta += kPi;
    if (theta >= kPi) theta -= kPi;
    int bin = static_cast<int>(theta / kPi * bins);
    return std::min(bin, bins - 1);
}

}  // namespace

double sample_bilinear(const ImageRaster& img, double x, double y, int c) {
    // Pixel p covers [p, p+1); its center sits at p + 0.5.
    const double fx = std::clamp(x - 0.5, 0.0, static_cast<double>(img.width - 1));
    const double fy = std::clamp(y - 0.5, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double ax = fx - x0;
    const double ay = fy - y0;
    const double top = (1.0 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c);
    const double bot = (1.0 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c);
    return (1.0 - ay) * top + ay * bot;
}

FeatureVector region_descriptor_raw(const ImageRaster& image, const BoundingBox& box,
                                    const DescriptorConfig& cfg) {
    const double pad_w = box.w * cfg.context_pad_fraction;
    const double pad_h = box.h * cfg.context_pad_fraction;
    double left = box.left() - pad_w;
    double right = box.right() + pad_w;
    double top = box.top() - pad_h;
    double bottom = box.bottom() + pad_h;

    if (right <= 0.0 || bottom <= 0.0 || left >= image.width || top >= image.height) {
        throw std::out_of_range("region out of frame");
    }

    // Clamp the padded crop to the image bounds, no reflection.
    left = std::max(left, 0.0);
    top = std::max(top, 0.0);
    right = std::min(right, static_cast<double>(image.width));
    bottom = std::min(bottom, static_cast<double>(image.height));

    const int S = cfg.resample_size;
    const double sx = (right - left) / S;
    const double sy = (bottom - top) / S;

    Plane r{S, std::vector<double>(static_cast<std::size_t>(S) * S)};
    Plane g = r, b = r, luma = r;
    for (int y = 0; y < S; ++y) {
        const double py = top + (y + 0.5) * sy;
        for (int x = 0; x < S; ++x) {
            const double px = left + (x + 0.5) * sx;
            const double rv = sample_bilinear(image, px, py, 0);
            const double gv = sample_bilinear(image, px, py, 1);
            const double bv = sample_bilinear(image, px, py, 2);
            r.at(x, y) = rv;
            g.at(x, y) = gv;
            b.at(x, y) = bv;
            luma.at(x, y) = (rv + gv + bv) / 3.0;
        }
    }

    const int cells = cfg.cells;
    const int bins = cfg.orientation_bins;
    const int cell_px = S / cells;
    const int values_per_cell = bins + 3;
    FeatureVector out;
    out.values.assign(static_cast<std::size_t>(cells) * cells * values_per_cell, 0.0);

    for (int y = 0; y < S; ++y) {
        for (int x = 0; x < S; ++x) {
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, S - 1);
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, S - 1);
            const double gx = luma.at(xp, y) - luma.at(xm, y);
            const double gy = luma.at(x, yp) - luma.at(x, ym);
            const double mag = std::sqrt(gx * gx + gy * gy);
            const int cx = std::min(x / cell_px, cells - 1);
            const int cy = std::min(y / cell_px, cells - 1);
            const std::size_t base = (static_cast<std::size_t>(cy) * cells + cx) * values_per_cell;
            if (mag > 0.0) out.values[base + orientation_bin(gx, gy, bins)] += mag;
            // Mean color per cell in an orthonormal opponent basis. The two
            // signed chroma axes keep hue contrasts from being washed out by
            // the shared brightness direction after normalization.
            const double rv2 = r.at(x, y), gv2 = g.at(x, y), bv2 = b.at(x, y);
            out.values[base + bins + 0] += (rv2 - gv2) * (1.0 / kSqrt2);
            out.values[base + bins + 1] += (rv2 + gv2 - 2.0 * bv2) * (1.0 / kSqrt6);
            out.values[base + bins + 2] += (rv2 + gv2 + bv2) * (1.0 / kSqrt3);
        }
    }

    const double cell_area = static_cast<double>(cell_px) * cell_px;
    for (int c = 0; c < cells * cells; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * values_per_cell;
        for (int k = 0; k < bins; ++k) out.values[base + k] *= cfg.gradient_gain / cell_area;
        out.values[base + bins + 0] *= cfg.chroma_gain / cell_area;
        out.values[base + bins + 1] *= cfg.chroma_gain / cell_area;
        out.values[base + bins + 2] *= cfg.brightness_gain / cell_area;
    }
    return out;
}

FeatureVector region_descriptor(const ImageRaster& image, const BoundingBox& box,
                                const DescriptorConfig& cfg) {
    FeatureVector f = region_descriptor_raw(image, box, cfg);
    double sq = 0.0;
    for (double v : f.values) sq += v * v;
    // Epsilon floor keeps the output defined on flat crops.
    const double inv = 1.0 / std::sqrt(sq + 1e-8);
    for (double& v : f.values) v *= inv;
    return f;
}

FrameDescriptor frame_descriptor(const ImageRaster& image, const DescriptorConfig& cfg) {
    constexpr int S = 32;  // working resolution of the luminance plane
    Plane luma{S, std::vector<double>(static_cast<std::size_t>(S) * S)};
    const double sx = static_cast<double>(image.width) / S;
    const double sy = static_cast<double>(image.height) / S;
    for (int y = 0; y < S; ++y) {
        for (int x = 0; x < S; ++x) {
            const double px = (x + 0.5) * sx;
            const double py = (y + 0.5) * sy;
            luma.at(x, y) = (sample_bilinear(image, px, py, 0) + sample_bilinear(image, px, py, 1) +
                             sample_bilinear(image, px, py, 2)) /
                            3.0;
        }
    }

    const int cells = cfg.frame_cells;
    const int bins = cfg.frame_orientation_bins;
    const int cell_px = S / cells;
    const int values_per_cell = 1 + bins;
    FrameDescriptor out;
    out.values.assign(static_cast<std::size_t>(cells) * cells * values_per_cell, 0.0);

    for (int y = 0; y < S; ++y) {
        for (int x = 0; x < S; ++x) {
            const int cx = std::min(x / cell_px, cells - 1);
            const int cy = std::min(y / cell_px, cells - 1);
            const std::size_t base = (static_cast<std::size_t>(cy) * cells + cx) * values_per_cell;
            out.values[base] += luma.at(x, y);

            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, S - 1);
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, S - 1);
            const double gx = luma.at(xp, y) - luma.at(xm, y);
            const double gy = luma.at(x, yp) - luma.at(x, ym);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag > 0.0) out.values[base + 1 + orientation_bin(gx, gy, bins)] += mag;
        }
    }

    const double cell_area = static_cast<double>(cell_px) * cell_px;
    for (double& v : out.values) v /= cell_area;
    return out;
}

double descriptor_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("descriptor dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

}  // namespace vidmine
