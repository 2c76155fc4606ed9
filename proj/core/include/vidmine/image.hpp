#pragma once

#include <cstddef>
#include <vector>

namespace vidmine {

// Interleaved RGB raster with values in [0, 1].
struct ImageRaster {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // size width * height * 3, row-major, RGB

    ImageRaster() = default;
    ImageRaster(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

    double& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    double luminance(int x, int y) const {
        const std::size_t base = (static_cast<std::size_t>(y) * width + x) * 3;
        return (pixels[base] + pixels[base + 1] + pixels[base + 2]) / 3.0;
    }

    bool valid() const { return width >= 16 && height >= 16; }
};

/// Bilinear sample of one channel at continuous coordinates, clamped to bounds.
double sample_bilinear(const ImageRaster& img, double x, double y, int c);

}  // namespace vidmine
