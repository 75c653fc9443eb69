#pragma once

#include <cmath>
#include <stdexcept>

#include "aos/geometry.hpp"

namespace aos {

/// Discretization of the synthetic focal plane: a rectangle of the given
/// extent (meters) around a ground-plane center, at a fixed resolution in
/// meters per pixel. Pixel dims are extent / resolution, rounded.
struct GridSpec {
    double center_x = 0.0;
    double center_y = 0.0;
    double extent_x = 30.0;
    double extent_y = 30.0;
    double resolution = 0.06;

    void validate() const {
        if (!(resolution > 0.0)) throw std::invalid_argument("GridSpec: resolution must be positive");
        if (!(extent_x > 0.0) || !(extent_y > 0.0))
            throw std::invalid_argument("GridSpec: extent must be positive");
    }

    int width() const { return static_cast<int>(std::llround(extent_x / resolution)); }
    int height() const { return static_cast<int>(std::llround(extent_y / resolution)); }
};

/// Canonical pixel-to-world mapping for a grid laid out in a plane. Column 0
/// is the west edge, row 0 the north edge; pixel centers are offset half a
/// cell. Every consumer (integrator, ground-truth renderer, tests) evaluates
/// the same expression so cross-checks are exact.
struct GridFrame {
    Vec3 point;     // plane anchor = grid center
    PlaneAxes axes; // in-plane east/north directions
    double resolution = 0.0;
    int width = 0;
    int height = 0;

    /// The grid center is an in-plane offset from the plane anchor, so a
    /// tilted focal plane keeps the same layout as the flat one at theta=0.
    static GridFrame from(const GridSpec& grid, const Vec3& plane_point, const PlaneAxes& axes) {
        grid.validate();
        const Vec3 anchor = plane_point + grid.center_x * axes.e1 + grid.center_y * axes.e2;
        return GridFrame{anchor, axes, grid.resolution, grid.width(), grid.height()};
    }

    /// Frame for a grid on the flat ground plane (z = 0).
    static GridFrame ground(const GridSpec& grid) {
        return from(grid, Vec3{0.0, 0.0, 0.0}, PlaneAxes{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
    }

    Vec3 at(int ix, int iy) const {
        const double u = (ix + 0.5 - 0.5 * width) * resolution;
        const double v = (0.5 * height - (iy + 0.5)) * resolution;
        return Vec3{point.x + u * axes.e1.x + v * axes.e2.x,
                    point.y + u * axes.e1.y + v * axes.e2.y,
                    point.z + u * axes.e1.z + v * axes.e2.z};
    }
};

}  // namespace aos
