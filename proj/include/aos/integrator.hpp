#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aos/geometry.hpp"
#include "aos/grid.hpp"
#include "aos/image.hpp"

namespace aos {

/// Pixel-bound rectangle, half-open on both axes.
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    Roi() = default;
    Roi(int x0_, int y0_, int x1_, int y1_) : x0(x0_), y0(y0_), x1(x1_), y1(y1_) {
        if (x1 <= x0 || y1 <= y0) throw std::invalid_argument("Roi: empty rectangle");
    }

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
};

/// Centered crop covering the given fraction of each image dimension,
/// floored to even pixel dims (the Haar metric needs them even).
Roi central_roi(int width, int height, double fraction = 0.5);

/// Synthetic-aperture integral: per grid pixel, the arithmetic mean of all
/// recordings whose projection of that focal-plane point lands in-bounds.
/// count[] is the number of contributing recordings; pixels with count 0
/// carry mean 0 and are invalid.
struct IntegralImage {
    int width = 0;
    int height = 0;
    std::vector<double> mean;
    std::vector<int32_t> count;
    GridSpec grid;
    SfpParams sfp{1.0, 0.0, 0.0};

    double mean_at(int x, int y) const { return mean[static_cast<size_t>(y) * width + x]; }
    int32_t count_at(int x, int y) const { return count[static_cast<size_t>(y) * width + x]; }
    bool valid_at(int x, int y) const { return count_at(x, y) > 0; }
};

/// Bilinear sample at continuous image coordinates; nullopt outside
/// [0, width-1] x [0, height-1].
std::optional<double> sample_bilinear(const ThermalImage& img, double u, double v);

/// Computes the SA integral of the recordings over the focal plane defined
/// by (sfp, sap_origin), discretized by grid. Per-pixel accumulation runs in
/// double precision with a fixed camera order, so the result is
/// bit-identical for any worker count.
IntegralImage integrate(std::span<const ThermalImage> images, std::span<const CameraPose> poses,
                        const Intrinsics& intr, const Vec3& sap_origin, const SfpParams& sfp,
                        const GridSpec& grid, int workers = 0);

struct RoiStats {
    double mean = 0.0;
    double variance = 0.0;       // population variance
    double valid_fraction = 0.0; // covered pixels / roi pixels
};

/// Population statistics over the valid (count > 0) pixels inside roi.
/// Throws when the roi leaves the image or covers no valid pixel.
RoiStats roi_stats(const IntegralImage& img, const Roi& roi);

}  // namespace aos
