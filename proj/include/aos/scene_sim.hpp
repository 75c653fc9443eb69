#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aos/geometry.hpp"
#include "aos/grid.hpp"
#include "aos/image.hpp"

// Procedural occluded-scene generator: warm targets on a noisy ground plane
// under one or more planar occluder layers. Everything is keyed off
// stateless hashes of cell coordinates, so rendering is bit-deterministic,
// needs no stored occupancy maps, and extends to arbitrary footprints.

namespace aos {

enum class TargetShape { Disk, Rectangle };

struct Target {
    TargetShape shape = TargetShape::Disk;
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.5;         // disk
    double half_extent_x = 0.5;  // rectangle
    double half_extent_y = 0.5;
    double value = 0.9;  // normalized thermal units

    bool contains(double x, double y) const {
        const double dx = x - center_x;
        const double dy = y - center_y;
        if (shape == TargetShape::Disk) return dx * dx + dy * dy <= radius * radius;
        return std::abs(dx) <= half_extent_x && std::abs(dy) <= half_extent_y;
    }

    void validate() const {
        const bool size_ok =
            shape == TargetShape::Disk ? radius > 0.0 : (half_extent_x > 0.0 && half_extent_y > 0.0);
        if (!size_ok) throw std::invalid_argument("Target: size must be positive");
        if (value < 0.0 || value > 1.0) throw std::invalid_argument("Target: value outside [0,1]");
    }
};

/// Planar layer of Bernoulli-occupied square cells at a fixed height. Cell
/// values are Gaussian around value_mean, clipped to [0,1].
struct OccluderLayer {
    double height = 15.0;  // meters above ground
    double density = 0.5;  // occupancy probability D
    double cell_size = 0.25;
    double value_mean = 0.35;
    double value_stddev = 0.05;
    uint64_t seed = 0;

    void validate() const {
        if (!(height > 0.0)) throw std::invalid_argument("OccluderLayer: height must be positive");
        if (density < 0.0 || density > 1.0)
            throw std::invalid_argument("OccluderLayer: density outside [0,1]");
        if (!(cell_size > 0.0)) throw std::invalid_argument("OccluderLayer: cell_size must be positive");
        if (value_stddev < 0.0) throw std::invalid_argument("OccluderLayer: stddev must be non-negative");
        if (value_mean < 0.0 || value_mean > 1.0)
            throw std::invalid_argument("OccluderLayer: value_mean outside [0,1]");
    }
};

struct SceneConfig {
    double ground_background = 0.2;
    double ground_noise_stddev = 0.0;
    std::vector<Target> targets;
    std::vector<OccluderLayer> layers;  // empty = open field
    uint64_t seed = 0;

    void validate() const {
        if (ground_background < 0.0 || ground_background > 1.0)
            throw std::invalid_argument("SceneConfig: ground_background outside [0,1]");
        if (ground_noise_stddev < 0.0)
            throw std::invalid_argument("SceneConfig: ground_noise_stddev must be non-negative");
        for (const auto& t : targets) t.validate();
        for (const auto& l : layers) l.validate();
    }

    SceneConfig without_layers() const {
        SceneConfig open = *this;
        open.layers.clear();
        return open;
    }
};

/// Occlusion-free ground signal at a world point: the last containing
/// target's value, otherwise background plus per-meter-cell Gaussian noise.
double ground_signal_at(const SceneConfig& scene, double x, double y);

/// Occupancy test of the layer cell containing (x, y); returns the cell's
/// thermal value when occupied.
std::optional<double> occluder_sample(const OccluderLayer& layer, double x, double y);

/// Renders one posed thermal view by ray casting: topmost occupied occluder
/// cell wins, otherwise the ground signal where the ray lands.
ThermalImage render_view(const SceneConfig& scene, const CameraPose& pose, const Intrinsics& intr,
                         int workers = 0);

/// Occlusion-free reference image sampled at the grid centers on the ground
/// plane; the "true" image the visibility metric compares against.
ThermalImage render_ground_truth(const SceneConfig& scene, const GridSpec& grid);

enum class PosePattern { Grid, Serpentine };

/// Nadir poses on a lattice inside a square aperture of the given area
/// (meters^2) centered above the world origin, with optional uniform
/// positional jitter of at most jitter_magnitude meters per axis.
std::vector<CameraPose> generate_poses(int count, double aperture_area, double altitude,
                                       PosePattern pattern = PosePattern::Grid,
                                       double jitter_magnitude = 0.0, uint64_t jitter_seed = 0);

}  // namespace aos
