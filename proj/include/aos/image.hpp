#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace aos {

/// Single thermal recording. Pixel values are normalized thermal units in
/// [0, 1], row-major, pixel (x, y) sampled at integer image coordinates.
struct ThermalImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    ThermalImage() = default;
    ThermalImage(int w, int h) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("ThermalImage: dims must be positive");
        pixels.assign(static_cast<size_t>(w) * static_cast<size_t>(h), 0.0f);
    }

    float at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    float& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return pixels.size(); }
};

}  // namespace aos
