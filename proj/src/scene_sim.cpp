#include "aos/scene_sim.hpp"

#include <algorithm>
#include <cmath>

#include "aos/parallel.hpp"
#include "aos/rng.hpp"

namespace aos {

namespace {

// Hash stream tags; values are arbitrary but frozen (files rendered with one
// build must reproduce bit-exactly on another).
constexpr uint64_t kStreamGroundNoise1 = 0x67726e64u;
constexpr uint64_t kStreamGroundNoise2 = 0x67726e65u;
constexpr uint64_t kStreamOccupancy = 0x6f636375u;
constexpr uint64_t kStreamCellValue1 = 0x76616c31u;
constexpr uint64_t kStreamCellValue2 = 0x76616c32u;
constexpr uint64_t kStreamJitter = 0x6a697474u;

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

int64_t cell_index(double v, double cell) { return static_cast<int64_t>(std::floor(v / cell)); }

}  // namespace

double ground_signal_at(const SceneConfig& scene, double x, double y) {
    for (auto it = scene.targets.rbegin(); it != scene.targets.rend(); ++it)
        if (it->contains(x, y)) return it->value;
    double v = scene.ground_background;
    if (scene.ground_noise_stddev > 0.0) {
        const int64_t cx = static_cast<int64_t>(std::floor(x));
        const int64_t cy = static_cast<int64_t>(std::floor(y));
        const double n = hash_normal(cell_hash(cx, cy, scene.seed, kStreamGroundNoise1),
                                     cell_hash(cx, cy, scene.seed, kStreamGroundNoise2));
        v += scene.ground_noise_stddev * n;
    }
    return clip01(v);
}

std::optional<double> occluder_sample(const OccluderLayer& layer, double x, double y) {
    const int64_t cx = cell_index(x, layer.cell_size);
    const int64_t cy = cell_index(y, layer.cell_size);
    const double u = to_unit_double(cell_hash(cx, cy, layer.seed, kStreamOccupancy));
    if (u >= layer.density) return std::nullopt;
    double v = layer.value_mean;
    if (layer.value_stddev > 0.0) {
        const double n = hash_normal(cell_hash(cx, cy, layer.seed, kStreamCellValue1),
                                     cell_hash(cx, cy, layer.seed, kStreamCellValue2));
        v += layer.value_stddev * n;
    }
    return clip01(v);
}

ThermalImage render_view(const SceneConfig& scene, const CameraPose& pose, const Intrinsics& intr,
                         int workers) {
    scene.validate();
    for (const auto& layer : scene.layers)
        if (pose.position.z <= layer.height)
            throw std::invalid_argument("render_view: camera not above all occluder layers");

    // Top-down layer order; the first occupied cell along the ray wins.
    std::vector<const OccluderLayer*> layers;
    layers.reserve(scene.layers.size());
    for (const auto& l : scene.layers) layers.push_back(&l);
    std::sort(layers.begin(), layers.end(),
              [](const OccluderLayer* a, const OccluderLayer* b) { return a->height > b->height; });

    ThermalImage img(intr.width, intr.height);
    parallel_for_chunks(0, intr.height, workers, [&](int y0, int y1) {
        for (int iy = y0; iy < y1; ++iy) {
            for (int ix = 0; ix < intr.width; ++ix) {
                const Ray ray = pixel_ray(pose, intr, static_cast<double>(ix), static_cast<double>(iy));
                if (ray.direction.z >= 0.0)
                    throw std::runtime_error("render_view: upward ray (misconfigured pose)");
                double value = -1.0;
                for (const OccluderLayer* layer : layers) {
                    const double t = (layer->height - ray.origin.z) / ray.direction.z;
                    const double hx = ray.origin.x + t * ray.direction.x;
                    const double hy = ray.origin.y + t * ray.direction.y;
                    if (auto v = occluder_sample(*layer, hx, hy)) {
                        value = *v;
                        break;
                    }
                }
                if (value < 0.0) {
                    const double t = -ray.origin.z / ray.direction.z;
                    value = ground_signal_at(scene, ray.origin.x + t * ray.direction.x,
                                             ray.origin.y + t * ray.direction.y);
                }
                img.at(ix, iy) = static_cast<float>(value);
            }
        }
    });
    return img;
}

ThermalImage render_ground_truth(const SceneConfig& scene, const GridSpec& grid) {
    scene.validate();
    const GridFrame frame = GridFrame::ground(grid);
    ThermalImage img(frame.width, frame.height);
    for (int iy = 0; iy < frame.height; ++iy) {
        for (int ix = 0; ix < frame.width; ++ix) {
            const Vec3 p = frame.at(ix, iy);
            img.at(ix, iy) = static_cast<float>(ground_signal_at(scene, p.x, p.y));
        }
    }
    return img;
}

std::vector<CameraPose> generate_poses(int count, double aperture_area, double altitude,
                                       PosePattern pattern, double jitter_magnitude,
                                       uint64_t jitter_seed) {
    if (count < 1) throw std::invalid_argument("generate_poses: count must be >= 1");
    if (!(aperture_area > 0.0)) throw std::invalid_argument("generate_poses: aperture area must be positive");
    if (!(altitude > 0.0)) throw std::invalid_argument("generate_poses: altitude must be positive");

    const double side = std::sqrt(aperture_area);
    const int rows = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(count)))));
    const int cols = (count + rows - 1) / rows;

    std::vector<CameraPose> poses;
    poses.reserve(static_cast<size_t>(count));
    for (int r = 0; r < rows && static_cast<int>(poses.size()) < count; ++r) {
        for (int k = 0; k < cols && static_cast<int>(poses.size()) < count; ++k) {
            const int c = (pattern == PosePattern::Serpentine && (r % 2) == 1) ? cols - 1 - k : k;
            double x = -0.5 * side + (c + 0.5) * side / cols;
            double y = -0.5 * side + (r + 0.5) * side / rows;
            if (jitter_magnitude > 0.0) {
                const uint64_t idx = static_cast<uint64_t>(poses.size());
                const double ux = to_unit_double(cell_hash(static_cast<int64_t>(idx), 0, jitter_seed, kStreamJitter));
                const double uy = to_unit_double(cell_hash(static_cast<int64_t>(idx), 1, jitter_seed, kStreamJitter));
                x = std::clamp(x + jitter_magnitude * (2.0 * ux - 1.0), -0.5 * side, 0.5 * side);
                y = std::clamp(y + jitter_magnitude * (2.0 * uy - 1.0), -0.5 * side, 0.5 * side);
            }
            poses.push_back(CameraPose::nadir({x, y, altitude}));
        }
    }
    return poses;
}

}  // namespace aos
