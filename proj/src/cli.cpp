#include "aos/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aos/dataset_io.hpp"
#include "aos/focus_metrics.hpp"
#include "aos/integrator.hpp"
#include "aos/optimizer.hpp"
#include "aos/parallel.hpp"
#include "aos/rng.hpp"
#include "aos/scene_sim.hpp"
#include "aos/stat_model.hpp"

namespace aos::cli {

namespace fs = std::filesystem;

namespace {

// Flag values that do not parse; distinct from data errors in exit code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    int workers = 0;
    uint64_t seed = 0;
    bool seed_set = false;
    bool verbose = false;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};

Range parse_range(const std::string& text) {
    Range r;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.lo, &r.hi, &r.step, &extra) != 3 ||
        !(r.step > 0.0) || r.hi < r.lo)
        throw UsageError("bad range '" + text + "' (expected lo:hi:step with step > 0)");
    return r;
}

std::vector<double> range_values(const Range& r) {
    std::vector<double> vals;
    const double n = std::floor((r.hi - r.lo) / r.step + 1e-9);
    for (int i = 0; i <= static_cast<int>(n); ++i) vals.push_back(r.lo + i * r.step);
    return vals;
}

// "a:b,c:d,e:f" -> bounds with d in meters, angles parsed as degrees.
Bounds parse_bounds(const std::string& text) {
    double v[6];
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf,%lf:%lf,%lf:%lf%c", &v[0], &v[1], &v[2], &v[3], &v[4],
                    &v[5], &extra) != 6)
        throw UsageError("bad bounds '" + text + "' (expected d0:d1,t0:t1,p0:p1)");
    Bounds b{{v[0], deg_to_rad(v[2]), deg_to_rad(v[4])},
             {v[1], deg_to_rad(v[3]), deg_to_rad(v[5])}};
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return b;
}

ParamVec parse_x0(const std::string& text) {
    double v[3];
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v[0], &v[1], &v[2], &extra) != 3)
        throw UsageError("bad x0 '" + text + "' (expected d,theta_deg,phi_deg)");
    return ParamVec{v[0], deg_to_rad(v[1]), deg_to_rad(v[2])};
}

void check_metric_list(const std::string& text) {
    if (text == "all") return;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) metric_from_name(item);  // throws on unknown
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// Raw 16-bit PGM of per-pixel contribution counts (maxval 65535, value =
// count, not a normalized quantity).
void write_count_map(const fs::path& path, const IntegralImage& img) {
    std::string bytes =
        "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
    for (int32_t c : img.count) {
        const auto q = static_cast<uint16_t>(std::clamp<int32_t>(c, 0, 65535));
        bytes.push_back(static_cast<char>(q >> 8));
        bytes.push_back(static_cast<char>(q & 0xff));
    }
    atomic_write_file(path, bytes);
}

ThermalImage integral_to_image(const IntegralImage& img) {
    ThermalImage out(img.width, img.height);
    for (size_t i = 0; i < img.mean.size(); ++i)
        out.pixels[i] = static_cast<float>(std::clamp(img.mean[i], 0.0, 1.0));
    return out;
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
    fs::path p = path;
    const std::string ext = p.extension().string();
    p.replace_extension();
    return fs::path(p.string() + suffix + ext);
}

// Mean squared error between the integral and the occlusion-free reference,
// over full-coverage pixels in the central half ROI.
double true_mse(const IntegralImage& img, const ThermalImage& truth, int full_count) {
    const Roi roi = central_roi(img.width, img.height);
    double acc = 0.0;
    long n = 0;
    for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1; ++x) {
            if (img.count_at(x, y) < full_count) continue;
            const double d = img.mean_at(x, y) - truth.at(x, y);
            acc += d * d;
            ++n;
        }
    }
    if (n == 0) throw std::runtime_error("true visibility: no full-coverage pixels in central roi");
    return acc / static_cast<double>(n);
}

struct SweepSpec {
    int var_index = 0;  // 0 d, 1 theta, 2 phi
    std::string var_name = "d";
    std::vector<double> values;   // native units (m or rad)
    ParamVec pinned{};            // values for the non-swept variables
};

std::vector<SweepRow> run_sweep(const Dataset& ds, const SweepSpec& spec, int workers,
                                bool verbose) {
    const std::vector<ThermalImage> images = ds.images();
    const std::vector<CameraPose> poses = ds.poses();
    const ThermalImage truth = render_ground_truth(ds.scenario.scene, ds.scenario.grid);
    const int n = static_cast<int>(images.size());

    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size());
    for (double value : spec.values) {
        ParamVec x = spec.pinned;
        x[spec.var_index] = value;
        const SfpParams sfp(x[0], x[1], x[2]);
        const IntegralImage img = integrate(images, poses, ds.scenario.intrinsics,
                                            ds.scenario.sap_origin(), sfp, ds.scenario.grid, workers);
        const Roi roi = central_roi(img.width, img.height);
        SweepRow row;
        const double out_value = spec.var_index == 0 ? value : rad_to_deg(value);
        row.vars = {out_value};
        for (size_t m = 0; m < kAllMetrics.size(); ++m)
            row.metrics[m] = focus_metric(kAllMetrics[m], img, roi);
        row.true_visibility = 1.0 - true_mse(img, truth, n);
        rows.push_back(row);
        if (verbose)
            std::cerr << fmt("sweep %s=%.4g glv=%.6g V=%.6g\n", spec.var_name.c_str(), out_value,
                             row.metrics[0], *row.true_visibility);
    }
    return rows;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const GlobalOpts& g) {
    const ScenarioConfig scenario = read_scenario(scenario_path);
    write_dataset(out_dir, scenario, g.workers);
    if (g.verbose)
        std::cerr << "simulate: wrote " << scenario.aperture.count << " recordings to " << out_dir
                  << "\n";
    return 0;
}

int cmd_integrate(const std::string& dataset_dir, double d, double theta_deg, double phi_deg,
                  const std::string& out_path, const GlobalOpts& g) {
    const Dataset ds = read_dataset(dataset_dir);
    const SfpParams sfp(d, deg_to_rad(theta_deg), deg_to_rad(phi_deg));
    const std::vector<ThermalImage> images = ds.images();
    const std::vector<CameraPose> poses = ds.poses();
    const IntegralImage img = integrate(images, poses, ds.scenario.intrinsics, ds.sap_origin(),
                                        sfp, ds.scenario.grid, g.workers);
    write_pgm16(out_path, integral_to_image(img));
    write_count_map(with_suffix(out_path, "_count"), img);
    if (g.verbose) {
        const RoiStats st = roi_stats(img, central_roi(img.width, img.height));
        std::cerr << fmt("integrate: d=%.3f theta=%.3f phi=%.3f mean=%.5f glv=%.6g\n", d, theta_deg,
                         phi_deg, st.mean, st.variance);
    }
    return 0;
}

int cmd_sweep(const std::string& dataset_dir, const std::string& var, const std::string& range_text,
              const std::string& metrics_text, double pin_d, double pin_theta_deg,
              double pin_phi_deg, const std::string& out_path, const GlobalOpts& g) {
    check_metric_list(metrics_text);
    const Dataset ds = read_dataset(dataset_dir);
    SweepSpec spec;
    if (var == "d") spec.var_index = 0;
    else if (var == "theta") spec.var_index = 1;
    else if (var == "phi") spec.var_index = 2;
    else throw UsageError("unknown sweep variable '" + var + "' (use d, theta or phi)");
    spec.var_name = var;
    const Range r = parse_range(range_text);
    spec.values = range_values(r);
    if (spec.var_index != 0)  // angles arrive in degrees
        for (double& v : spec.values) v = deg_to_rad(v);
    const double default_d = pin_d > 0.0 ? pin_d : ds.scenario.aperture.altitude;
    spec.pinned = ParamVec{default_d, deg_to_rad(pin_theta_deg), deg_to_rad(pin_phi_deg)};

    const std::vector<SweepRow> rows = run_sweep(ds, spec, g.workers, g.verbose);
    const std::string col = spec.var_index == 0 ? "d" : var + "_deg";
    write_sweep_csv(out_path, {col}, rows);
    return 0;
}

int cmd_optimize(const std::string& dataset_dir, const std::string& method,
                 const std::string& x0_text, const std::string& bounds_text,
                 const std::string& steps_text, int max_evals, const std::string& out_path,
                 const GlobalOpts& g) {
    const Dataset ds = read_dataset(dataset_dir);
    const std::vector<ThermalImage> images = ds.images();
    const std::vector<CameraPose> poses = ds.poses();
    const Roi roi = central_roi(ds.scenario.grid.width(), ds.scenario.grid.height());
    const SfpObjective objective(images, poses, ds.scenario.intrinsics, ds.sap_origin(),
                                 ds.scenario.grid, ds.scenario.metric, roi, g.workers);

    Bounds bounds = ds.scenario.bounds.to_bounds();
    if (method == "ss" && bounds_text.empty()) {
        // Wide default box for global runs without a useful initial guess.
        const double alt = ds.scenario.aperture.altitude;
        bounds = Bounds{{5.0, deg_to_rad(-45.0), deg_to_rad(-180.0)},
                        {2.0 * alt, deg_to_rad(45.0), deg_to_rad(180.0)}};
    }
    if (!bounds_text.empty()) bounds = parse_bounds(bounds_text);

    OptOptions opts;
    opts.seed = g.seed_set ? g.seed : ds.scenario.optimizer_seed;
    if (max_evals > 0) opts.max_evals = max_evals;

    OptResult result;
    if (method == "sqp") {
        ParamVec x0;
        if (!x0_text.empty()) {
            x0 = parse_x0(x0_text);
        } else {
            for (int i = 0; i < 3; ++i) x0[i] = 0.5 * (bounds.lower[i] + bounds.upper[i]);
        }
        if (!bounds.contains(x0)) throw UsageError("x0 outside bounds");
        result = sqp_local(objective, x0, bounds, opts);
    } else if (method == "ss") {
        result = scatter_search(objective, bounds, opts);
    } else if (method == "grid") {
        std::array<int, 3> steps = {33, 5, 5};
        if (!steps_text.empty()) {
            char extra = 0;
            if (std::sscanf(steps_text.c_str(), "%d,%d,%d%c", &steps[0], &steps[1], &steps[2],
                            &extra) != 3 ||
                steps[0] < 1 || steps[1] < 1 || steps[2] < 1)
                throw UsageError("bad steps '" + steps_text + "' (expected n_d,n_theta,n_phi)");
        }
        result = grid_search(objective, bounds, steps);
    } else {
        throw UsageError("unknown method '" + method + "' (use sqp, ss or grid)");
    }

    write_trace_csv(out_path, result);
    std::cout << fmt("method=%s best_d=%.6g best_theta_deg=%.6g best_phi_deg=%.6g value=%.9g "
                     "evals=%d converged=%d\n",
                     method.c_str(), result.best_x[0], rad_to_deg(result.best_x[1]),
                     rad_to_deg(result.best_x[2]), result.best_value, result.evals,
                     result.converged ? 1 : 0);
    return 0;
}

int cmd_compare_metrics(const std::string& dataset_dir, const std::string& range_text,
                        const std::string& out_path, const GlobalOpts& g) {
    const Dataset ds = read_dataset(dataset_dir);
    SweepSpec spec;
    spec.var_index = 0;
    spec.var_name = "d";
    Range r{ds.scenario.bounds.d[0], ds.scenario.bounds.d[1], 0.5};
    if (!range_text.empty()) r = parse_range(range_text);
    spec.values = range_values(r);
    spec.pinned = ParamVec{ds.scenario.aperture.altitude, 0.0, 0.0};

    const std::vector<SweepRow> rows = run_sweep(ds, spec, g.workers, g.verbose);
    write_sweep_csv(out_path, {"d"}, rows);

    for (size_t m = 0; m < kAllMetrics.size(); ++m) {
        size_t best = 0;
        for (size_t i = 1; i < rows.size(); ++i)
            if (rows[i].metrics[m] > rows[best].metrics[m]) best = i;
        std::cout << fmt("%s argmax d=%.6g value=%.9g\n",
                         std::string(metric_name(kAllMetrics[m])).c_str(), rows[best].vars[0],
                         rows[best].metrics[m]);
    }
    size_t best = 0;
    for (size_t i = 1; i < rows.size(); ++i)
        if (*rows[i].true_visibility > *rows[best].true_visibility) best = i;
    std::cout << fmt("true_visibility argmax d=%.6g value=%.9g\n", rows[best].vars[0],
                     *rows[best].true_visibility);
    return 0;
}

int cmd_validate_model(const std::string& grid_name, long trials, const std::string& out_path,
                       const GlobalOpts& g) {
    if (grid_name != "default") throw UsageError("unknown validation grid '" + grid_name + "'");
    if (trials < 2) throw UsageError("--trials must be >= 2");

    // Moments match the stock simulated scene's model parameters.
    const double mu_s = 0.2, var_s = 0.04, mu_f = 0.35, var_f = 0.0025;
    std::string csv = "D,N,family,closed,mc,stderr,pass\n";
    bool all_pass = true;
    for (double density : {0.25, 0.5, 0.75}) {
        for (int n : {1, 10, 100}) {
            for (DistFamily family : {DistFamily::Gaussian, DistFamily::TwoPoint}) {
                OcclusionModelParams p{density, n, mu_s, var_s, mu_f, var_f, family};
                const uint64_t seed = hash_combine(g.seed_set ? g.seed : 424242,
                                                   hash_combine(static_cast<uint64_t>(n * 1000 + static_cast<int>(density * 100)),
                                                                static_cast<uint64_t>(family)));
                const ModelCheckReport rep = model_check(p, trials, seed, g.workers);
                all_pass = all_pass && rep.pass;
                csv += fmt("%.9g,%d,%s,%.9g,%.9g,%.9g,%d\n", density, n,
                           std::string(family_name(family)).c_str(), rep.closed_form_mse, rep.mc_mse,
                           rep.mc_stderr, rep.pass ? 1 : 0);
                if (g.verbose)
                    std::cerr << fmt("validate D=%.2f N=%d %s closed=%.6g mc=%.6g se=%.3g %s\n",
                                     density, n, std::string(family_name(family)).c_str(),
                                     rep.closed_form_mse, rep.mc_mse, rep.mc_stderr,
                                     rep.pass ? "pass" : "FAIL");
            }
        }
    }
    if (!out_path.empty()) atomic_write_file(out_path, csv);
    std::cout << (all_pass ? "validate-model: all grid points pass\n"
                           : "validate-model: FAILURES present\n");
    return all_pass ? 0 : 3;
}

int cmd_benchmark(const std::string& dataset_dir, int repeats, const GlobalOpts& g) {
    if (repeats < 1) throw UsageError("--repeats must be >= 1");
    const Dataset ds = read_dataset(dataset_dir);
    const std::vector<ThermalImage> images = ds.images();
    const std::vector<CameraPose> poses = ds.poses();
    const SfpParams sfp(ds.scenario.aperture.altitude, 0.0, 0.0);

    std::vector<double> ms;
    ms.reserve(static_cast<size_t>(repeats));
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const IntegralImage img = integrate(images, poses, ds.scenario.intrinsics, ds.sap_origin(),
                                            sfp, ds.scenario.grid, g.workers);
        const auto t1 = std::chrono::steady_clock::now();
        (void)img;
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    const double min = ms.front();
    const double median = ms[ms.size() / 2];
    const double p95 = ms[static_cast<size_t>(std::min<double>(
        static_cast<double>(ms.size()) - 1, std::ceil(0.95 * static_cast<double>(ms.size())) - 1))];
    std::cout << fmt("benchmark: n=%d images=%zu grid=%dx%d workers=%d min_ms=%.2f median_ms=%.2f "
                     "p95_ms=%.2f\n",
                     repeats, images.size(), ds.scenario.grid.width(), ds.scenario.grid.height(),
                     resolve_workers(g.workers), min, median, p95);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Thermal synthetic-aperture visibility toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--workers", g.workers, "Worker threads (0 = all cores)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Override the scenario RNG seed");
    app.add_flag("--verbose", g.verbose, "Chatty progress on stderr");

    std::string scenario_path, dataset_dir, out_path, var = "d", range_text, metrics_text = "all";
    std::string method = "sqp", x0_text, bounds_text, steps_text, grid_name = "default";
    double d = 0.0, theta_deg = 0.0, phi_deg = 0.0;
    int max_evals = 0, repeats = 10;
    long trials = 1000000;

    auto* simulate = app.add_subcommand("simulate", "Render a simulated dataset");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    simulate->add_option("--out", out_path, "Output dataset directory")->required();

    auto* integrate_cmd = app.add_subcommand("integrate", "Compute one integral image");
    integrate_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    integrate_cmd->add_option("--d", d, "Focal plane distance below the aperture, m")->required();
    integrate_cmd->add_option("--theta", theta_deg, "Tilt, degrees");
    integrate_cmd->add_option("--phi", phi_deg, "Tilt azimuth, degrees");
    integrate_cmd->add_option("--out", out_path, "Output PGM (count map gets _count)")->required();

    auto* sweep = app.add_subcommand("sweep", "Metric sweep over one focal-plane variable");
    sweep->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    sweep->add_option("--var", var, "Swept variable: d, theta or phi");
    sweep->add_option("--range", range_text, "lo:hi:step (degrees for angles)")->required();
    sweep->add_option("--metrics", metrics_text, "all or comma-separated metric names");
    sweep->add_option("--d", d, "Pinned d when sweeping angles (default: altitude)");
    sweep->add_option("--theta", theta_deg, "Pinned theta, degrees");
    sweep->add_option("--phi", phi_deg, "Pinned phi, degrees");
    sweep->add_option("--out", out_path, "Output CSV")->required();

    auto* optimize = app.add_subcommand("optimize", "Maximize the focus objective");
    optimize->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    optimize->add_option("--method", method, "sqp, ss or grid")->required();
    optimize->add_option("--x0", x0_text, "Start point d,theta_deg,phi_deg (sqp)");
    optimize->add_option("--bounds", bounds_text, "d0:d1,t0:t1,p0:p1 (degrees)");
    optimize->add_option("--steps", steps_text, "Grid steps n_d,n_theta,n_phi");
    optimize->add_option("--max-evals", max_evals, "Evaluation budget");
    optimize->add_option("--out", out_path, "Trace CSV")->required();

    auto* compare = app.add_subcommand("compare-metrics", "Seven-metric d-sweep plus argmax report");
    compare->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    compare->add_option("--range", range_text, "lo:hi:step (default: scenario d bounds, step 0.5)");
    compare->add_option("--out", out_path, "Output CSV")->required();

    auto* validate = app.add_subcommand("validate-model", "Closed form vs Monte Carlo");
    validate->add_option("--grid", grid_name, "Check grid (default)");
    validate->add_option("--trials", trials, "Monte Carlo trials per grid point");
    validate->add_option("--out", out_path, "Output CSV");

    auto* benchmark = app.add_subcommand("benchmark", "Integration latency");
    benchmark->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    benchmark->add_option("--repeats", repeats, "Number of timed integrations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (simulate->parsed()) return cmd_simulate(scenario_path, out_path, g);
        if (integrate_cmd->parsed())
            return cmd_integrate(dataset_dir, d, theta_deg, phi_deg, out_path, g);
        if (sweep->parsed())
            return cmd_sweep(dataset_dir, var, range_text, metrics_text, d, theta_deg, phi_deg,
                             out_path, g);
        if (optimize->parsed())
            return cmd_optimize(dataset_dir, method, x0_text, bounds_text, steps_text, max_evals,
                                out_path, g);
        if (compare->parsed()) return cmd_compare_metrics(dataset_dir, range_text, out_path, g);
        if (validate->parsed()) return cmd_validate_model(grid_name, trials, out_path, g);
        if (benchmark->parsed()) return cmd_benchmark(dataset_dir, repeats, g);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace aos::cli
