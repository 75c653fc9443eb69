#include "aos/dataset_io.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace aos {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void atomic_write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

std::string fmt(const char* format, ...) {
    char buf[128];
    va_list args;
    va_start(args, format);
    vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

}  // namespace

// --- PGM16 -------------------------------------------------------------------

void write_pgm16(const fs::path& path, const ThermalImage& img) {
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("write_pgm16: empty image");
    std::string bytes = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                        "\n65535\n";
    bytes.reserve(bytes.size() + img.size() * 2);
    for (float v : img.pixels) {
        const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
        const auto q = static_cast<uint16_t>(std::lround(c * 65535.0));
        bytes.push_back(static_cast<char>(q >> 8));
        bytes.push_back(static_cast<char>(q & 0xff));
    }
    atomic_write_file(path, bytes);
}

namespace {

// Whitespace-and-comment skipper for the PGM header; returns false at EOF.
bool pgm_skip_ws(const std::string& bytes, size_t& pos) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            return true;
        }
    }
    return false;
}

long pgm_parse_uint(const std::string& bytes, size_t& pos, const char* label, const fs::path& path) {
    if (!pgm_skip_ws(bytes, pos))
        throw ParseError(path.string() + ": missing " + label + " at byte " + std::to_string(pos));
    const size_t start = pos;
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1000000000L)
            throw ParseError(path.string() + ": implausible " + label + " at byte " +
                             std::to_string(start));
        ++pos;
    }
    if (pos == start)
        throw ParseError(path.string() + ": expected " + label + " at byte " + std::to_string(pos));
    return value;
}

}  // namespace

ThermalImage read_pgm16(const fs::path& path) {
    const std::string bytes = read_file(path);
    size_t pos = 0;
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ParseError(path.string() + ": not a binary PGM (bad magic at byte 0)");
    pos = 2;
    const long w = pgm_parse_uint(bytes, pos, "width", path);
    const long h = pgm_parse_uint(bytes, pos, "height", path);
    if (w <= 0 || h <= 0 || w > 100000 || h > 100000)
        throw ParseError(path.string() + ": bad image dimensions " + std::to_string(w) + "x" +
                         std::to_string(h));
    const size_t maxval_at = pos;
    const long maxval = pgm_parse_uint(bytes, pos, "maxval", path);
    if (maxval != 65535)
        throw ParseError(path.string() + ": unsupported maxval " + std::to_string(maxval) +
                         " at byte " + std::to_string(maxval_at) + " (need 65535)");
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw ParseError(path.string() + ": missing whitespace after maxval at byte " +
                         std::to_string(pos));
    ++pos;
    const size_t need = static_cast<size_t>(w) * static_cast<size_t>(h) * 2;
    const size_t have = bytes.size() - pos;
    if (have < need)
        throw ParseError(path.string() + ": truncated pixel data at byte " + std::to_string(pos) +
                         " (need " + std::to_string(need) + " bytes, have " + std::to_string(have) +
                         ")");
    if (have > need)
        throw ParseError(path.string() + ": trailing bytes after pixel data at byte " +
                         std::to_string(pos + need));
    ThermalImage img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < img.size(); ++i) {
        const auto hi = static_cast<unsigned char>(bytes[pos + 2 * i]);
        const auto lo = static_cast<unsigned char>(bytes[pos + 2 * i + 1]);
        img.pixels[i] = static_cast<float>((hi << 8 | lo) / 65535.0);
    }
    return img;
}

// --- poses CSV ---------------------------------------------------------------

namespace {
constexpr const char* kPoseHeader = "image_id,x,y,z,qw,qx,qy,qz";

double parse_double_field(const std::string& field, const char* col, long row,
                          const fs::path& path) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw ParseError(path.string() + ": row " + std::to_string(row) + ": bad number in column " + col);
    }
    if (used != field.size() || !std::isfinite(v))
        throw ParseError(path.string() + ": row " + std::to_string(row) +
                         ": non-finite or malformed value in column " + col);
    return v;
}
}  // namespace

void write_poses_csv(const fs::path& path, const PoseTable& table) {
    if (table.ids.size() != table.poses.size())
        throw std::invalid_argument("write_poses_csv: ids/poses length mismatch");
    std::string out = std::string(kPoseHeader) + "\n";
    for (size_t i = 0; i < table.ids.size(); ++i) {
        const CameraPose& p = table.poses[i];
        out += table.ids[i];
        for (double v : {p.position.x, p.position.y, p.position.z, p.rotation.w(), p.rotation.x(),
                         p.rotation.y(), p.rotation.z()})
            out += fmt(",%.12g", v);
        out += "\n";
    }
    atomic_write_file(path, out);
}

PoseTable read_poses_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kPoseHeader)
        throw ParseError(path.string() + ": bad or missing header (expected '" +
                         std::string(kPoseHeader) + "')");
    PoseTable table;
    std::unordered_set<std::string> seen;
    long row = 1;
    static const char* kCols[8] = {"image_id", "x", "y", "z", "qw", "qx", "qy", "qz"};
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            const size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 8)
            throw ParseError(path.string() + ": row " + std::to_string(row) + ": expected 8 columns, got " +
                             std::to_string(fields.size()));
        if (fields[0].empty())
            throw ParseError(path.string() + ": row " + std::to_string(row) + ": empty image_id");
        if (!seen.insert(fields[0]).second)
            throw ParseError(path.string() + ": row " + std::to_string(row) + ": duplicate image_id '" +
                             fields[0] + "'");
        double v[7];
        for (int c = 0; c < 7; ++c) v[c] = parse_double_field(fields[c + 1], kCols[c + 1], row, path);
        const double qnorm = std::sqrt(v[3] * v[3] + v[4] * v[4] + v[5] * v[5] + v[6] * v[6]);
        if (std::abs(qnorm - 1.0) > 1e-6)
            throw ParseError(path.string() + ": row " + std::to_string(row) +
                             ": quaternion norm " + fmt("%.9g", qnorm) + " too far from 1");
        table.ids.push_back(fields[0]);
        table.poses.push_back(CameraPose{Vec3{v[0], v[1], v[2]},
                                         Rotation::renormalized(v[3], v[4], v[5], v[6])});
    }
    return table;
}

// --- scenario JSON -----------------------------------------------------------

namespace {

[[noreturn]] void schema_error(const fs::path& path, const std::string& ptr, const std::string& what) {
    throw ParseError(path.string() + ": " + ptr + ": " + what);
}

void check_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                const fs::path& path, const std::string& ptr) {
    if (!obj.is_object()) schema_error(path, ptr, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) schema_error(path, ptr, "unknown key '" + key + "'");
    }
}

double get_number(const ordered_json& obj, const char* key, double fallback, const fs::path& path,
                  const std::string& ptr) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) schema_error(path, ptr + "/" + key, "expected a number");
    return v.get<double>();
}

long get_integer(const ordered_json& obj, const char* key, long fallback, const fs::path& path,
                 const std::string& ptr) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) schema_error(path, ptr + "/" + key, "expected an integer");
    return v.get<long>();
}

uint64_t get_seed(const ordered_json& obj, const char* key, uint64_t fallback, const fs::path& path,
                  const std::string& ptr) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) schema_error(path, ptr + "/" + key, "expected an integer seed");
    return v.get<uint64_t>();
}

std::string get_string(const ordered_json& obj, const char* key, const std::string& fallback,
                       const fs::path& path, const std::string& ptr) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) schema_error(path, ptr + "/" + key, "expected a string");
    return v.get<std::string>();
}

std::array<double, 2> get_pair(const ordered_json& obj, const char* key,
                               std::array<double, 2> fallback, const fs::path& path,
                               const std::string& ptr) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        schema_error(path, ptr + "/" + key, "expected an array of two numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

ScenarioConfig read_scenario(const fs::path& path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": invalid JSON: " + e.what());
    }
    check_keys(doc, {"scene", "aperture", "intrinsics", "grid", "bounds", "metric", "seeds"}, path, "");
    if (!doc.contains("scene")) schema_error(path, "", "missing required key 'scene'");
    if (!doc.contains("aperture")) schema_error(path, "", "missing required key 'aperture'");

    ScenarioConfig cfg;

    {
        const auto& s = doc.at("scene");
        check_keys(s, {"ground_background", "ground_noise_stddev", "seed", "targets", "layers"},
                   path, "/scene");
        cfg.scene.ground_background = get_number(s, "ground_background", 0.2, path, "/scene");
        cfg.scene.ground_noise_stddev = get_number(s, "ground_noise_stddev", 0.0, path, "/scene");
        cfg.scene.seed = get_seed(s, "seed", 0, path, "/scene");
        if (s.contains("targets")) {
            if (!s.at("targets").is_array()) schema_error(path, "/scene/targets", "expected an array");
            int idx = 0;
            for (const auto& t : s.at("targets")) {
                const std::string ptr = "/scene/targets/" + std::to_string(idx++);
                check_keys(t, {"shape", "center", "radius", "half_extents", "value"}, path, ptr);
                Target target;
                const std::string shape = get_string(t, "shape", "disk", path, ptr);
                if (shape == "disk") target.shape = TargetShape::Disk;
                else if (shape == "rectangle") target.shape = TargetShape::Rectangle;
                else schema_error(path, ptr + "/shape", "unknown shape '" + shape + "'");
                const auto center = get_pair(t, "center", {0.0, 0.0}, path, ptr);
                target.center_x = center[0];
                target.center_y = center[1];
                target.radius = get_number(t, "radius", 0.5, path, ptr);
                const auto he = get_pair(t, "half_extents", {0.5, 0.5}, path, ptr);
                target.half_extent_x = he[0];
                target.half_extent_y = he[1];
                target.value = get_number(t, "value", 0.9, path, ptr);
                cfg.scene.targets.push_back(target);
            }
        }
        if (s.contains("layers")) {
            if (!s.at("layers").is_array()) schema_error(path, "/scene/layers", "expected an array");
            int idx = 0;
            for (const auto& l : s.at("layers")) {
                const std::string ptr = "/scene/layers/" + std::to_string(idx++);
                check_keys(l, {"height", "density", "cell_size", "value_mean", "value_stddev", "seed"},
                           path, ptr);
                OccluderLayer layer;
                layer.height = get_number(l, "height", 15.0, path, ptr);
                layer.density = get_number(l, "density", 0.5, path, ptr);
                layer.cell_size = get_number(l, "cell_size", 0.25, path, ptr);
                layer.value_mean = get_number(l, "value_mean", 0.35, path, ptr);
                layer.value_stddev = get_number(l, "value_stddev", 0.05, path, ptr);
                layer.seed = get_seed(l, "seed", 0, path, ptr);
                cfg.scene.layers.push_back(layer);
            }
        }
    }

    {
        const auto& a = doc.at("aperture");
        check_keys(a, {"count", "area", "altitude", "pattern", "jitter", "jitter_seed"}, path,
                   "/aperture");
        cfg.aperture.count = static_cast<int>(get_integer(a, "count", 340, path, "/aperture"));
        cfg.aperture.area = get_number(a, "area", 900.0, path, "/aperture");
        cfg.aperture.altitude = get_number(a, "altitude", 30.0, path, "/aperture");
        const std::string pattern = get_string(a, "pattern", "grid", path, "/aperture");
        if (pattern == "grid") cfg.aperture.pattern = PosePattern::Grid;
        else if (pattern == "serpentine") cfg.aperture.pattern = PosePattern::Serpentine;
        else schema_error(path, "/aperture/pattern", "unknown pattern '" + pattern + "'");
        cfg.aperture.jitter = get_number(a, "jitter", 0.0, path, "/aperture");
        cfg.aperture.jitter_seed = get_seed(a, "jitter_seed", 0, path, "/aperture");
    }

    if (doc.contains("intrinsics")) {
        const auto& in = doc.at("intrinsics");
        check_keys(in, {"fx", "fy", "cx", "cy", "width", "height"}, path, "/intrinsics");
        try {
            cfg.intrinsics = Intrinsics(
                get_number(in, "fx", 120.0, path, "/intrinsics"),
                get_number(in, "fy", 120.0, path, "/intrinsics"),
                get_number(in, "cx", 160.0, path, "/intrinsics"),
                get_number(in, "cy", 128.0, path, "/intrinsics"),
                static_cast<int>(get_integer(in, "width", 320, path, "/intrinsics")),
                static_cast<int>(get_integer(in, "height", 256, path, "/intrinsics")));
        } catch (const std::invalid_argument& e) {
            schema_error(path, "/intrinsics", e.what());
        }
    }

    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        check_keys(g, {"center", "extent", "resolution"}, path, "/grid");
        const auto center = get_pair(g, "center", {0.0, 0.0}, path, "/grid");
        const auto extent = get_pair(g, "extent", {30.0, 30.0}, path, "/grid");
        cfg.grid.center_x = center[0];
        cfg.grid.center_y = center[1];
        cfg.grid.extent_x = extent[0];
        cfg.grid.extent_y = extent[1];
        cfg.grid.resolution = get_number(g, "resolution", 0.06, path, "/grid");
    }

    if (doc.contains("bounds")) {
        const auto& b = doc.at("bounds");
        check_keys(b, {"d", "theta_deg", "phi_deg"}, path, "/bounds");
        cfg.bounds.d = get_pair(b, "d", {22.0, 38.0}, path, "/bounds");
        cfg.bounds.theta_deg = get_pair(b, "theta_deg", {-10.0, 10.0}, path, "/bounds");
        cfg.bounds.phi_deg = get_pair(b, "phi_deg", {-180.0, 180.0}, path, "/bounds");
    }

    if (doc.contains("metric")) {
        const auto& m = doc.at("metric");
        if (!m.is_string()) schema_error(path, "/metric", "expected a string");
        try {
            cfg.metric = metric_from_name(m.get<std::string>());
        } catch (const std::invalid_argument& e) {
            schema_error(path, "/metric", e.what());
        }
    }

    if (doc.contains("seeds")) {
        const auto& s = doc.at("seeds");
        check_keys(s, {"optimizer"}, path, "/seeds");
        cfg.optimizer_seed = get_seed(s, "optimizer", 0, path, "/seeds");
    }

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return cfg;
}

void ScenarioConfig::validate() const {
    scene.validate();
    if (aperture.count < 1) throw std::invalid_argument("aperture: count must be >= 1");
    if (!(aperture.area > 0.0)) throw std::invalid_argument("aperture: area must be positive");
    if (!(aperture.altitude > 0.0)) throw std::invalid_argument("aperture: altitude must be positive");
    if (aperture.jitter < 0.0) throw std::invalid_argument("aperture: jitter must be non-negative");
    for (const auto& layer : scene.layers)
        if (layer.height >= aperture.altitude)
            throw std::invalid_argument("scene: occluder layer at or above flight altitude");
    grid.validate();
    if (!(bounds.d[0] < bounds.d[1]) || !(bounds.theta_deg[0] < bounds.theta_deg[1]) ||
        !(bounds.phi_deg[0] < bounds.phi_deg[1]))
        throw std::invalid_argument("bounds: lower must be strictly below upper");
    if (!(bounds.d[0] > 0.0)) throw std::invalid_argument("bounds: d lower bound must be positive");
    if (bounds.theta_deg[0] < -45.0 || bounds.theta_deg[1] > 45.0)
        throw std::invalid_argument("bounds: |theta| must stay within 45 degrees");
    if (bounds.phi_deg[0] < -180.0 || bounds.phi_deg[1] > 180.0)
        throw std::invalid_argument("bounds: phi must stay within [-180, 180] degrees");
}

void write_scenario(const fs::path& path, const ScenarioConfig& config) {
    config.validate();
    ordered_json doc;
    ordered_json scene;
    scene["ground_background"] = config.scene.ground_background;
    scene["ground_noise_stddev"] = config.scene.ground_noise_stddev;
    scene["seed"] = config.scene.seed;
    scene["targets"] = ordered_json::array();
    for (const auto& t : config.scene.targets) {
        ordered_json jt;
        jt["shape"] = t.shape == TargetShape::Disk ? "disk" : "rectangle";
        jt["center"] = {t.center_x, t.center_y};
        if (t.shape == TargetShape::Disk) jt["radius"] = t.radius;
        else jt["half_extents"] = {t.half_extent_x, t.half_extent_y};
        jt["value"] = t.value;
        scene["targets"].push_back(jt);
    }
    scene["layers"] = ordered_json::array();
    for (const auto& l : config.scene.layers) {
        ordered_json jl;
        jl["height"] = l.height;
        jl["density"] = l.density;
        jl["cell_size"] = l.cell_size;
        jl["value_mean"] = l.value_mean;
        jl["value_stddev"] = l.value_stddev;
        jl["seed"] = l.seed;
        scene["layers"].push_back(jl);
    }
    doc["scene"] = scene;

    ordered_json aperture;
    aperture["count"] = config.aperture.count;
    aperture["area"] = config.aperture.area;
    aperture["altitude"] = config.aperture.altitude;
    aperture["pattern"] = config.aperture.pattern == PosePattern::Grid ? "grid" : "serpentine";
    aperture["jitter"] = config.aperture.jitter;
    aperture["jitter_seed"] = config.aperture.jitter_seed;
    doc["aperture"] = aperture;

    ordered_json intr;
    intr["fx"] = config.intrinsics.fx;
    intr["fy"] = config.intrinsics.fy;
    intr["cx"] = config.intrinsics.cx;
    intr["cy"] = config.intrinsics.cy;
    intr["width"] = config.intrinsics.width;
    intr["height"] = config.intrinsics.height;
    doc["intrinsics"] = intr;

    ordered_json grid;
    grid["center"] = {config.grid.center_x, config.grid.center_y};
    grid["extent"] = {config.grid.extent_x, config.grid.extent_y};
    grid["resolution"] = config.grid.resolution;
    doc["grid"] = grid;

    ordered_json bounds;
    bounds["d"] = config.bounds.d;
    bounds["theta_deg"] = config.bounds.theta_deg;
    bounds["phi_deg"] = config.bounds.phi_deg;
    doc["bounds"] = bounds;

    doc["metric"] = std::string(metric_name(config.metric));
    doc["seeds"] = ordered_json{{"optimizer", config.optimizer_seed}};

    atomic_write_file(path, doc.dump(2) + "\n");
}

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.scene.ground_background = 0.2;
    cfg.scene.ground_noise_stddev = 0.08;
    cfg.scene.seed = 1;
    cfg.scene.targets = {
        Target{TargetShape::Disk, 0.0, 0.0, 0.5, 0.5, 0.5, 0.9},
        Target{TargetShape::Disk, -3.5, 2.5, 0.5, 0.5, 0.5, 0.9},
        Target{TargetShape::Disk, 4.0, -3.0, 0.5, 0.5, 0.5, 0.9},
    };
    // Thin multi-layer canopy, combined occlusion density 0.5 for nadir rays.
    cfg.scene.layers = {
        OccluderLayer{13.5, 0.1591, 0.25, 0.35, 0.05, 11},
        OccluderLayer{14.5, 0.1591, 0.25, 0.35, 0.05, 12},
        OccluderLayer{15.5, 0.1591, 0.25, 0.35, 0.05, 13},
        OccluderLayer{16.5, 0.1591, 0.25, 0.35, 0.05, 14},
    };
    cfg.aperture = ApertureConfig{340, 900.0, 30.0, PosePattern::Grid, 0.5, 2};
    cfg.intrinsics = Intrinsics(120.0, 120.0, 160.0, 128.0, 320, 256);
    cfg.grid = GridSpec{0.0, 0.0, 30.0, 30.0, 0.06};
    cfg.bounds = BoundsConfig{{22.0, 38.0}, {-10.0, 10.0}, {-180.0, 180.0}};
    cfg.metric = MetricId::Glv;
    cfg.optimizer_seed = 7;
    return cfg;
}

// --- datasets ----------------------------------------------------------------

std::vector<CameraPose> Dataset::poses() const {
    std::vector<CameraPose> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.pose);
    return out;
}

std::vector<ThermalImage> Dataset::images() const {
    std::vector<ThermalImage> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.image);
    return out;
}

void write_dataset(const fs::path& dir, const ScenarioConfig& scenario, int workers) {
    scenario.validate();
    fs::create_directories(dir / "images");
    const std::vector<CameraPose> poses =
        generate_poses(scenario.aperture.count, scenario.aperture.area, scenario.aperture.altitude,
                       scenario.aperture.pattern, scenario.aperture.jitter,
                       scenario.aperture.jitter_seed);
    PoseTable table;
    for (size_t i = 0; i < poses.size(); ++i) {
        const std::string id = fmt("im%06zu", i);
        const ThermalImage img = render_view(scenario.scene, poses[i], scenario.intrinsics, workers);
        write_pgm16(dir / "images" / (id + ".pgm"), img);
        table.ids.push_back(id);
        table.poses.push_back(poses[i]);
    }
    write_poses_csv(dir / "poses.csv", table);
    write_scenario(dir / "scenario.json", scenario);
}

Dataset read_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ParseError("dataset directory not found: " + dir.string());
    Dataset ds;
    ds.scenario = read_scenario(dir / "scenario.json");
    const PoseTable table = read_poses_csv(dir / "poses.csv");
    ds.records.reserve(table.ids.size());
    for (size_t i = 0; i < table.ids.size(); ++i) {
        ThermalImage img = read_pgm16(dir / "images" / (table.ids[i] + ".pgm"));
        if (img.width != ds.scenario.intrinsics.width || img.height != ds.scenario.intrinsics.height)
            throw ParseError(dir.string() + ": image " + table.ids[i] +
                             " dims do not match scenario intrinsics");
        ds.records.push_back(DatasetRecord{table.ids[i], table.poses[i], std::move(img)});
    }
    return ds;
}

// --- result tables -------------------------------------------------------------

void write_sweep_csv(const fs::path& path, const std::vector<std::string>& var_names,
                     const std::vector<SweepRow>& rows) {
    const bool with_truth = !rows.empty() && rows.front().true_visibility.has_value();
    std::string out;
    for (const auto& name : var_names) out += name + ",";
    for (size_t i = 0; i < kAllMetrics.size(); ++i) {
        out += std::string(metric_name(kAllMetrics[i]));
        if (i + 1 < kAllMetrics.size()) out += ",";
    }
    if (with_truth) out += ",true_visibility";
    out += "\n";
    for (const auto& row : rows) {
        if (row.vars.size() != var_names.size())
            throw std::invalid_argument("write_sweep_csv: row variable count mismatch");
        if (row.true_visibility.has_value() != with_truth)
            throw std::invalid_argument("write_sweep_csv: inconsistent true_visibility presence");
        for (double v : row.vars) out += fmt("%.9g,", v);
        for (size_t i = 0; i < row.metrics.size(); ++i) {
            out += fmt("%.9g", row.metrics[i]);
            if (i + 1 < row.metrics.size()) out += ",";
        }
        if (with_truth) out += fmt(",%.9g", *row.true_visibility);
        out += "\n";
    }
    atomic_write_file(path, out);
}

void write_trace_csv(const fs::path& path, const OptResult& result) {
    std::string out = "eval_index,d,theta_deg,phi_deg,value\n";
    for (size_t i = 0; i < result.trace.size(); ++i) {
        const TracePoint& tp = result.trace[i];
        out += fmt("%zu,%.9g,%.9g,%.9g,%.9g\n", i, tp.x[0], rad_to_deg(tp.x[1]),
                   rad_to_deg(tp.x[2]), tp.value);
    }
    atomic_write_file(path, out);
}

}  // namespace aos
