#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aos/focus_metrics.hpp"
#include "aos/geometry.hpp"
#include "aos/grid.hpp"
#include "aos/image.hpp"
#include "aos/optimizer.hpp"
#include "aos/scene_sim.hpp"

// File formats. Everything here is bit-exact and deterministic: rerunning a
// pipeline with the same inputs reproduces identical bytes. All writers go
// through a temp-file + rename so readers never see partial output.

namespace aos {

/// Malformed input file; the message names the file and the offending spot.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

void atomic_write_file(const std::filesystem::path& path, const std::string& bytes);

// --- 16-bit binary PGM (P5, maxval 65535, big-endian) ---------------------

/// Quantizes normalized [0,1] pixels to round(v * 65535).
void write_pgm16(const std::filesystem::path& path, const ThermalImage& img);
ThermalImage read_pgm16(const std::filesystem::path& path);

// --- pose tables -----------------------------------------------------------

struct PoseTable {
    std::vector<std::string> ids;
    std::vector<CameraPose> poses;
};

/// CSV with header image_id,x,y,z,qw,qx,qy,qz; 12 significant digits.
void write_poses_csv(const std::filesystem::path& path, const PoseTable& table);

/// Quaternions within 1e-6 of unit norm are renormalized, anything worse is
/// rejected; duplicate ids and non-finite values are rejected.
PoseTable read_poses_csv(const std::filesystem::path& path);

// --- scenario configuration -------------------------------------------------

struct ApertureConfig {
    int count = 340;
    double area = 900.0;  // square aperture, m^2
    double altitude = 30.0;
    PosePattern pattern = PosePattern::Grid;
    double jitter = 0.0;
    uint64_t jitter_seed = 0;
};

/// Optimization box as written in scenario files: d in meters, angles in
/// degrees (kept in file units so round-trips are byte-stable).
struct BoundsConfig {
    std::array<double, 2> d = {22.0, 38.0};
    std::array<double, 2> theta_deg = {-10.0, 10.0};
    std::array<double, 2> phi_deg = {-180.0, 180.0};

    Bounds to_bounds() const {
        return Bounds{{d[0], deg_to_rad(theta_deg[0]), deg_to_rad(phi_deg[0])},
                      {d[1], deg_to_rad(theta_deg[1]), deg_to_rad(phi_deg[1])}};
    }
};

struct ScenarioConfig {
    SceneConfig scene;
    ApertureConfig aperture;
    Intrinsics intrinsics{120.0, 120.0, 160.0, 128.0, 320, 256};
    GridSpec grid;
    BoundsConfig bounds;
    MetricId metric = MetricId::Glv;
    uint64_t optimizer_seed = 0;

    Vec3 sap_origin() const { return Vec3{0.0, 0.0, aperture.altitude}; }
    void validate() const;
};

/// Strict-schema JSON: unknown keys are rejected with their path; absent
/// optional keys take defaults. write_scenario materializes every default so
/// files are self-describing, and write(read(write(x))) is a fixed point.
ScenarioConfig read_scenario(const std::filesystem::path& path);
void write_scenario(const std::filesystem::path& path, const ScenarioConfig& config);

/// The stock demo scenario ("conifer-sim"): occluded forest-like scene over
/// warm disk targets. Also shipped as scenarios/conifer-sim.json.
ScenarioConfig default_scenario();

// --- datasets ---------------------------------------------------------------

struct DatasetRecord {
    std::string image_id;
    CameraPose pose;
    ThermalImage image;
};

/// A recorded (or simulated) image set plus the scenario it came from.
struct Dataset {
    ScenarioConfig scenario;
    std::vector<DatasetRecord> records;

    Intrinsics intrinsics() const { return scenario.intrinsics; }
    Vec3 sap_origin() const { return scenario.sap_origin(); }
    std::vector<CameraPose> poses() const;
    std::vector<ThermalImage> images() const;  // copies; records hold the originals
};

/// Renders the scenario's recordings and writes dir/scenario.json,
/// dir/poses.csv and dir/images/<id>.pgm.
void write_dataset(const std::filesystem::path& dir, const ScenarioConfig& scenario,
                   int workers = 0);
Dataset read_dataset(const std::filesystem::path& dir);

// --- result tables -----------------------------------------------------------

struct SweepRow {
    std::vector<double> vars;
    std::array<double, 7> metrics{};  // kAllMetrics order
    std::optional<double> true_visibility;
};

/// CSV with the sweep variable columns, the seven canonical metric columns,
/// and true_visibility when present (all rows must agree); 9 significant
/// digits, rows in sweep order.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<std::string>& var_names,
                     const std::vector<SweepRow>& rows);

/// CSV trace of an optimizer run: eval_index,d,theta_deg,phi_deg,value.
void write_trace_csv(const std::filesystem::path& path, const OptResult& result);

}  // namespace aos
