#pragma once

#include <vector>

#include "vidmine/geometry.hpp"
#include "vidmine/image.hpp"

namespace vidmine {

// Unit-length region descriptor. The dimension is fixed per run and derived
// from DescriptorConfig: cells * cells * (orientation bins + 3 color values).
struct FeatureVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

// Global frame descriptor used for key-frame selection. Dimension
// frame_cells^2 * (1 + frame_orientation_bins).
struct FrameDescriptor {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

struct DescriptorConfig {
    int cells = 4;                  // region descriptor spatial grid
    int orientation_bins = 8;       // unsigned gradient bins over [0, pi)
    int resample_size = 64;         // padded crop is resampled to this square
    double context_pad_fraction = 16.0 / 227.0;  // extra context on each side
    double gradient_gain = 8.0;     // balance of gradient block vs color block
    double chroma_gain = 4.0;       // weight of the two signed chroma axes
    double brightness_gain = 0.5;   // weight of the shared brightness axis

    int frame_cells = 4;            // frame descriptor spatial grid
    int frame_orientation_bins = 3; // per-cell orientation energies

    int region_dim() const { return cells * cells * (orientation_bins + 3); }
    int frame_dim() const { return frame_cells * frame_cells * (1 + frame_orientation_bins); }
};

/// Grid descriptor of the context-padded crop around `box`: per-cell
/// gradient-orientation histograms plus per-cell mean color, unit-normalized.
/// The padded crop is clamped to the image bounds. Throws out_of_range when
/// the padded box does not intersect the image at all.
FeatureVector region_descriptor(const ImageRaster& image, const BoundingBox& box,
                                const DescriptorConfig& cfg);

/// Same as region_descriptor but without the final unit normalization.
/// Cell layout: [orientation bins..., mean r, mean g, mean b] per cell.
FeatureVector region_descriptor_raw(const ImageRaster& image, const BoundingBox& box,
                                    const DescriptorConfig& cfg);

/// Coarse whole-frame descriptor: per-cell mean luminance plus per-cell
/// orientation energy.
FrameDescriptor frame_descriptor(const ImageRaster& image, const DescriptorConfig& cfg);

/// Euclidean distance between two equal-dimension vectors.
double descriptor_distance(const std::vector<double>& a, const std::vector<double>& b);

inline double descriptor_distance(const FeatureVector& a, const FeatureVector& b) {
    return descriptor_distance(a.values, b.values);
}
inline double descriptor_distance(const FrameDescriptor& a, const FrameDescriptor& b) {
    return descriptor_distance(a.values, b.values);
}

}  // namespace vidmine
