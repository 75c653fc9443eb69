// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavy shared state (the stock simulated dataset and its
// d-sweep) is computed once up front.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "aos/cli.hpp"
#include "aos/rng.hpp"
#include "aos/dataset_io.hpp"
#include "aos/focus_metrics.hpp"
#include "aos/integrator.hpp"
#include "aos/optimizer.hpp"
#include "aos/scene_sim.hpp"
#include "aos/stat_model.hpp"

using namespace aos;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    printf("%s  criterion %d: %s  [%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
           detail.c_str());
    fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Spearman rank correlation; values are continuous so ties are incidental.
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = a.size();
    auto ranks = [](const std::vector<double>& v) {
        std::vector<size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
        return r;
    };
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    double ma = 0, mb = 0;
    for (size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double num = 0, da = 0, db = 0;
    for (size_t i = 0; i < n; ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

struct SharedData {
    ScenarioConfig scenario;
    std::vector<CameraPose> poses;
    std::vector<ThermalImage> images;       // occluded recordings
    std::vector<ThermalImage> open_images;  // matched occlusion-free recordings
    ThermalImage truth;

    // d-sweep over the scenario bounds, step 0.5
    std::vector<double> sweep_d;
    std::vector<IntegralImage> sweep_imgs;

    Vec3 sap() const { return scenario.sap_origin(); }
};

SharedData build_shared() {
    SharedData s;
    s.scenario = default_scenario();
    s.poses = generate_poses(s.scenario.aperture.count, s.scenario.aperture.area,
                             s.scenario.aperture.altitude, s.scenario.aperture.pattern,
                             s.scenario.aperture.jitter, s.scenario.aperture.jitter_seed);
    const SceneConfig open = s.scenario.scene.without_layers();
    s.images.reserve(s.poses.size());
    s.open_images.reserve(s.poses.size());
    for (const auto& p : s.poses) {
        s.images.push_back(render_view(s.scenario.scene, p, s.scenario.intrinsics, 0));
        s.open_images.push_back(render_view(open, p, s.scenario.intrinsics, 0));
    }
    s.truth = render_ground_truth(s.scenario.scene, s.scenario.grid);
    for (double d = s.scenario.bounds.d[0]; d <= s.scenario.bounds.d[1] + 1e-9; d += 0.5)
        s.sweep_d.push_back(d);
    s.sweep_imgs.reserve(s.sweep_d.size());
    for (double d : s.sweep_d)
        s.sweep_imgs.push_back(integrate(s.images, s.poses, s.scenario.intrinsics, s.sap(),
                                         SfpParams(d, 0.0, 0.0), s.scenario.grid, 0));
    return s;
}

double true_visibility(const SharedData& s, const IntegralImage& img) {
    const Roi roi = central_roi(img.width, img.height);
    const int n = static_cast<int>(s.images.size());
    double acc = 0.0;
    long cnt = 0;
    for (int y = roi.y0; y < roi.y1; ++y)
        for (int x = roi.x0; x < roi.x1; ++x)
            if (img.count_at(x, y) >= n) {
                const double d = img.mean_at(x, y) - s.truth.at(x, y);
                acc += d * d;
                ++cnt;
            }
    return cnt > 0 ? 1.0 - acc / static_cast<double>(cnt) : -1.0;
}

// GLV objective on the 15x15 m sub-grid whose pixels coincide exactly with
// the central-half ROI of the full 30x30 m grid (same centers, resolution
// and anchor), so values match the CLI objective while integrating a
// quarter of the samples.
SfpObjective make_fast_objective(const SharedData& s, const GridSpec& subgrid, const Roi& roi) {
    return SfpObjective(s.images, s.poses, s.scenario.intrinsics, s.sap(), subgrid,
                        MetricId::Glv, roi, 0);
}

// ---------------------------------------------------------------------------

void criterion1_model(int workers) {
    const double t0 = now_s();
    const double mu_s = 0.2, var_s = 0.04, mu_f = 0.35, var_f = 0.0025;
    bool all_pass = true;
    std::string worst;
    for (double density : {0.25, 0.5, 0.75}) {
        for (int n : {1, 10, 100}) {
            for (DistFamily family : {DistFamily::Gaussian, DistFamily::TwoPoint}) {
                const OcclusionModelParams p{density, n, mu_s, var_s, mu_f, var_f, family};
                const uint64_t seed =
                    hash_combine(20260810, static_cast<uint64_t>(n * 1000) +
                                               static_cast<uint64_t>(density * 100) * 7 +
                                               static_cast<uint64_t>(family));
                const ModelCheckReport rep = model_check(p, 1000000, seed, workers);
                if (!rep.pass) {
                    all_pass = false;
                    worst = fmt("D=%.2f N=%d %s |closed-mc|=%.3g > 4se=%.3g", density, n,
                                std::string(family_name(family)).c_str(),
                                std::abs(rep.closed_form_mse - rep.mc_mse), 4.0 * rep.mc_stderr);
                }
            }
        }
    }

    // exact reduction to the binary-occluder visibility on an 11x5 grid
    double worst_red = 0.0;
    for (int i = 0; i <= 10; ++i) {
        for (int n : {1, 2, 5, 10, 100}) {
            const double d = i / 10.0;
            const OcclusionModelParams p{d, n, 0.0, 0.0, 1.0, 0.0, DistFamily::Gaussian};
            worst_red = std::max(
                worst_red, std::abs(mse_closed_form(p) - (1.0 - visibility_simple(d, n))));
        }
    }
    const double elapsed = now_s() - t0;
    const bool pass = all_pass && worst_red <= 1e-15 && elapsed <= 60.0;
    report(1, "closed-form MSE vs Monte Carlo (3x3x2 grid, 1e6 trials) + exact Eq.-1 reduction",
           pass,
           fmt("mc_grid=%s, reduction_err=%.2g, elapsed=%.1fs%s%s", all_pass ? "all-pass" : "FAIL",
               worst_red, elapsed, worst.empty() ? "" : " ", worst.c_str()));
}

void criterion2_proxy(const SharedData& s) {
    std::vector<double> glvs, vis;
    for (size_t i = 0; i < s.sweep_imgs.size(); ++i) {
        const Roi roi = central_roi(s.sweep_imgs[i].width, s.sweep_imgs[i].height);
        glvs.push_back(glv(s.sweep_imgs[i], roi));
        vis.push_back(true_visibility(s, s.sweep_imgs[i]));
    }
    const double rho = spearman(glvs, vis);

    // affine in var_s with slope D^2 + D(1-D)/N
    const double density = 0.5;
    const int n = 340;
    const double slope_expected = density * density + density * (1.0 - density) / n;
    OcclusionModelParams p{density, n, 0.2, 0.0, 0.35, 0.0025, DistFamily::Gaussian};
    const double m0 = mse_closed_form(p);
    p.var_s = 0.01;
    const double m1 = mse_closed_form(p);
    p.var_s = 0.02;
    const double m2 = mse_closed_form(p);
    const bool affine = std::abs((m1 - m0) - (m2 - m1)) <= 1e-15 &&
                        std::abs((m2 - m0) / 0.02 - slope_expected) <= 1e-12 * slope_expected;

    report(2, "GLV tracks true visibility over the d-sweep; MSE affine in target variance",
           rho >= 0.9 && affine, fmt("spearman=%.4f (need >= 0.9), affine=%s", rho,
                                     affine ? "exact" : "VIOLATED"));
}

void criterion3_metrics(const SharedData& s, const fs::path& outdir) {
    // argmax of glv / normalized_variance over the sweep
    size_t best_glv = 0, best_nv = 0;
    std::vector<SweepRow> rows;
    for (size_t i = 0; i < s.sweep_imgs.size(); ++i) {
        const Roi roi = central_roi(s.sweep_imgs[i].width, s.sweep_imgs[i].height);
        SweepRow row;
        row.vars = {s.sweep_d[i]};
        for (size_t m = 0; m < kAllMetrics.size(); ++m)
            row.metrics[m] = focus_metric(kAllMetrics[m], s.sweep_imgs[i], roi);
        row.true_visibility = true_visibility(s, s.sweep_imgs[i]);
        rows.push_back(row);
        if (row.metrics[0] > rows[best_glv].metrics[0]) best_glv = i;
        if (row.metrics[1] > rows[best_nv].metrics[1]) best_nv = i;
    }
    const fs::path csv = outdir / "metric_comparison.csv";
    write_sweep_csv(csv, {"d"}, rows);
    const bool emitted = fs::exists(csv);

    const double ground_d = s.scenario.aperture.altitude;  // ground plane at z=0
    const bool argmax_ok = std::abs(rows[best_glv].vars[0] - ground_d) <= 0.5 &&
                           std::abs(rows[best_nv].vars[0] - ground_d) <= 0.5;

    // bokeh structure: defocused occluded vs matched occlusion-free integral
    bool bokeh_ok = true;
    std::string bokeh_detail;
    for (double d : {ground_d - 5.0, ground_d + 5.0}) {
        const SfpParams sfp(d, 0.0, 0.0);
        const IntegralImage occ = integrate(s.images, s.poses, s.scenario.intrinsics, s.sap(),
                                            sfp, s.scenario.grid, 0);
        const IntegralImage open = integrate(s.open_images, s.poses, s.scenario.intrinsics,
                                             s.sap(), sfp, s.scenario.grid, 0);
        const Roi roi = central_roi(occ.width, occ.height);
        const double lap_occ = focus_metric(MetricId::LaplacianEnergy, occ, roi);
        const double lap_open = focus_metric(MetricId::LaplacianEnergy, open, roi);
        const double ten_occ = focus_metric(MetricId::Tenengrad, occ, roi);
        const double ten_open = focus_metric(MetricId::Tenengrad, open, roi);
        bokeh_ok = bokeh_ok && lap_occ > lap_open && ten_occ > ten_open;
        bokeh_detail += fmt(" d=%g lap %.3g>%.3g ten %.3g>%.3g;", d, lap_occ, lap_open, ten_occ,
                            ten_open);
    }

    report(3, "variance-metric argmax at the ground distance; 7-metric CSV; structured bokeh",
           argmax_ok && emitted && bokeh_ok,
           fmt("glv_argmax=%.1f nv_argmax=%.1f (true %.1f), csv=%s,%s", rows[best_glv].vars[0],
               rows[best_nv].vars[0], ground_d, emitted ? "written" : "MISSING",
               bokeh_detail.c_str()));
}

bool sfp_close(const ParamVec& a, const ParamVec& oracle) {
    const double dd = std::abs(a[0] - oracle[0]);
    const double dt = std::abs(a[1] - oracle[1]);
    double dp = std::abs(SfpParams::wrap_angle(a[2] - oracle[2]));
    // phi is a gauge freedom when the plane is horizontal
    const bool phi_relevant = std::abs(oracle[1]) > deg_to_rad(1.0);
    return dd <= 0.5 && dt <= deg_to_rad(1.0) && (!phi_relevant || dp <= deg_to_rad(1.0));
}

void criterion4_optimizers(const SharedData& s) {
    const GridSpec subgrid{0.0, 0.0, 15.0, 15.0, 0.06};
    const Roi full_roi(0, 0, subgrid.width(), subgrid.height());
    const SfpObjective objective = make_fast_objective(s, subgrid, full_roi);
    const Objective f = [&objective](const ParamVec& x) { return objective(x); };

    const Bounds bounds = s.scenario.bounds.to_bounds();
    const OptResult oracle = grid_search(f, bounds, {33, 5, 5});

    OptOptions opts;
    opts.max_evals = 150;
    opts.seed = s.scenario.optimizer_seed;
    const ParamVec mid = {0.5 * (bounds.lower[0] + bounds.upper[0]),
                          0.5 * (bounds.lower[1] + bounds.upper[1]),
                          0.5 * (bounds.lower[2] + bounds.upper[2])};
    const OptResult sqp = sqp_local(f, mid, bounds, opts);
    const OptResult sqp2 = sqp_local(f, {24.0, deg_to_rad(-5.0), deg_to_rad(90.0)}, bounds, opts);

    OptOptions ss_opts;
    ss_opts.max_evals = 1200;
    ss_opts.eps_f = 1e-9;
    ss_opts.seed = s.scenario.optimizer_seed;
    const Bounds wide{{5.0, deg_to_rad(-45.0), deg_to_rad(-180.0)},
                      {2.0 * s.scenario.aperture.altitude, deg_to_rad(45.0), deg_to_rad(180.0)}};
    const OptResult ss = scatter_search(f, wide, ss_opts);

    const double ratio = static_cast<double>(ss.evals) / std::max(1, sqp.evals);
    const bool pass = sfp_close(sqp.best_x, oracle.best_x) && sqp.evals <= 150 &&
                      sfp_close(sqp2.best_x, oracle.best_x) && sqp2.evals <= 150 &&
                      sfp_close(ss.best_x, oracle.best_x) && ratio >= 5.0;
    report(4, "SQP matches the grid oracle in <= 150 evals; scatter search matches over the wide box",
           pass,
           fmt("oracle_d=%.2f sqp_d=%.2f(%d evals) sqp2_d=%.2f(%d) ss_d=%.2f(%d) ratio=%.1f",
               oracle.best_x[0], sqp.best_x[0], sqp.evals, sqp2.best_x[0], sqp2.evals,
               ss.best_x[0], ss.evals, ratio));
}

void criterion5_test_functions() {
    const Bounds box{{-5.0, -5.0, -5.0}, {5.0, 5.0, 5.0}};
    OptOptions o;
    o.h_d = 1e-6;
    o.h_ang = 1e-6;
    o.eps_x = 1e-10;
    o.eps_f = 1e-14;
    o.max_evals = 5000;

    const ParamVec target = {1.5, -2.0, 0.5};
    const Objective quad = [&target](const ParamVec& x) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += (x[i] - target[i]) * (x[i] - target[i]);
        return -acc;
    };
    OptOptions oq = o;
    oq.max_evals = 60;
    const OptResult rq = sqp_local(quad, {0.0, 0.0, 0.0}, box, oq);
    double quad_err = 0.0;
    for (int i = 0; i < 3; ++i) quad_err = std::max(quad_err, std::abs(rq.best_x[i] - target[i]));

    const Objective rosen = [](const ParamVec& x) {
        return -((1.0 - x[0]) * (1.0 - x[0]) +
                 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]));
    };
    const Bounds rbox{{-2.0, -1.0, 0.0}, {2.0, 3.0, 1e-9}};
    const OptResult rr = sqp_local(rosen, {-1.2, 1.0, 0.0}, rbox, o);
    const double rosen_err = std::max(std::abs(rr.best_x[0] - 1.0), std::abs(rr.best_x[1] - 1.0));

    const Objective basins = [](const ParamVec& x) {
        const double tall = std::exp(-(x[0] - 25.0) * (x[0] - 25.0) / 4.5);
        const double low = 0.7 * std::exp(-(x[0] - 35.0) * (x[0] - 35.0) / 4.5);
        return std::max(tall, low);
    };
    const Bounds bbox{{22.0, -0.5, -1.0}, {38.0, 0.5, 1.0}};
    int hits = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        OptOptions so = o;
        so.seed = seed;
        so.max_evals = 2000;
        const OptResult r = scatter_search(basins, bbox, so);
        if (std::abs(r.best_x[0] - 25.0) < 0.5) ++hits;
    }

    const bool pass = rq.evals <= 60 && quad_err <= 1e-6 && rosen_err <= 1e-4 && hits >= 95;
    report(5, "analytic test functions: quadratic, Rosenbrock, two-basin global selection", pass,
           fmt("quad_err=%.2g in %d evals, rosenbrock_err=%.2g, basin_hits=%d/100", quad_err,
               rq.evals, rosen_err, hits));
}

void criterion6_performance(const SharedData& s) {
    const SfpParams sfp(s.scenario.aperture.altitude, 0.0, 0.0);
    auto time_integrate = [&](int workers) {
        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const double t0 = now_s();
            const IntegralImage img = integrate(s.images, s.poses, s.scenario.intrinsics,
                                                s.sap(), sfp, s.scenario.grid, workers);
            best = std::min(best, now_s() - t0);
            (void)img;
        }
        return best;
    };
    const double single = time_integrate(1);
    const double eight = time_integrate(8);
    const bool pass = single <= 1.0 && eight <= 0.25;
    report(6, "integration latency: <= 1 s single-worker, <= 250 ms with 8 workers", pass,
           fmt("single=%.0fms eight_workers=%.0fms on %u hardware threads", single * 1e3,
               eight * 1e3, std::thread::hardware_concurrency()));
}

void criterion7_integral_invariants(const SharedData& s) {
    // mean constancy over the sweep, full-coverage central ROI
    const int n = static_cast<int>(s.images.size());
    double mean_min = 1e300, mean_max = -1e300;
    for (const auto& img : s.sweep_imgs) {
        const Roi roi = central_roi(img.width, img.height);
        double sum = 0.0;
        long cnt = 0;
        for (int y = roi.y0; y < roi.y1; ++y)
            for (int x = roi.x0; x < roi.x1; ++x)
                if (img.count_at(x, y) >= n) {
                    sum += img.mean_at(x, y);
                    ++cnt;
                }
        const double mean = sum / std::max(1L, cnt);
        mean_min = std::min(mean_min, mean);
        mean_max = std::max(mean_max, mean);
    }
    const double drift = (mean_max - mean_min) / mean_min;

    // worker-count bit determinism
    const SfpParams sfp(27.5, deg_to_rad(2.0), deg_to_rad(30.0));
    const IntegralImage a =
        integrate(s.images, s.poses, s.scenario.intrinsics, s.sap(), sfp, s.scenario.grid, 1);
    const IntegralImage b =
        integrate(s.images, s.poses, s.scenario.intrinsics, s.sap(), sfp, s.scenario.grid, 8);
    const bool deterministic = a.mean == b.mean && a.count == b.count;

    // N=1 equals the bilinear resampling route exactly
    const SfpParams sfp1(30.0, 0.0, 0.0);
    const IntegralImage one = integrate({&s.images[0], 1}, {&s.poses[0], 1},
                                        s.scenario.intrinsics, s.sap(), sfp1, s.scenario.grid, 0);
    const Plane plane = sfp_plane(sfp1, s.sap());
    const GridFrame frame = GridFrame::from(s.scenario.grid, plane.point, sfp_plane_axes(sfp1));
    bool exact = true;
    for (int iy = 0; iy < one.height && exact; ++iy) {
        for (int ix = 0; ix < one.width; ++ix) {
            const auto px = project(s.poses[0], s.scenario.intrinsics, frame.at(ix, iy));
            std::optional<double> v;
            if (px) v = sample_bilinear(s.images[0], px->u, px->v);
            if (v.has_value() != (one.count_at(ix, iy) == 1) ||
                (v.has_value() && *v != one.mean_at(ix, iy))) {
                exact = false;
                break;
            }
        }
    }

    report(7, "integral invariants: mean constancy <= 2%, worker determinism, exact N=1",
           drift <= 0.02 && deterministic && exact,
           fmt("mean_drift=%.3f%%, workers=%s, n1=%s", drift * 100.0,
               deterministic ? "bit-identical" : "DIFFER", exact ? "exact" : "DIFFER"));
}

void criterion8_io(const fs::path& outdir) {
    bool ok = true;
    std::string detail;

    // PGM round trip at quantization precision
    {
        ThermalImage img(33, 17);
        SplitMix64 rng(123);
        for (auto& v : img.pixels) v = static_cast<float>(rng.uniform01());
        write_pgm16(outdir / "rt.pgm", img);
        const ThermalImage back = read_pgm16(outdir / "rt.pgm");
        double worst = 0.0;
        for (size_t i = 0; i < img.size(); ++i)
            worst = std::max(worst, std::abs(static_cast<double>(img.pixels[i]) - back.pixels[i]));
        if (worst > 1.0 / 65535.0) {
            ok = false;
            detail += fmt("pgm_err=%.3g;", worst);
        }
    }

    // poses round trip
    {
        PoseTable t;
        t.ids = {"a", "b"};
        t.poses = {CameraPose::nadir({1.25, -3.5, 31.0}), CameraPose::nadir({0.1, 0.2, 29.5})};
        write_poses_csv(outdir / "p.csv", t);
        const PoseTable back = read_poses_csv(outdir / "p.csv");
        for (size_t i = 0; i < t.poses.size(); ++i)
            if (std::abs(back.poses[i].position.x - t.poses[i].position.x) > 1e-9 ||
                std::abs(back.poses[i].rotation.x() - t.poses[i].rotation.x()) > 1e-9)
                ok = false;
    }

    // scenario fixed point
    {
        write_scenario(outdir / "s1.json", default_scenario());
        const ScenarioConfig c = read_scenario(outdir / "s1.json");
        write_scenario(outdir / "s2.json", c);
        std::ifstream f1(outdir / "s1.json", std::ios::binary);
        std::ifstream f2(outdir / "s2.json", std::ios::binary);
        const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
        const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
        if (b1 != b2) {
            ok = false;
            detail += "scenario_not_fixed_point;";
        }
    }

    // corrupt corpus fully rejected
    {
        const fs::path corpus = fs::path(AOS_TEST_DATA_DIR) / "corrupt";
        int rejected = 0, total = 0;
        for (const auto& entry : fs::directory_iterator(corpus)) {
            ++total;
            const std::string name = entry.path().filename().string();
            try {
                if (name.ends_with(".pgm")) read_pgm16(entry.path());
                else if (name.ends_with(".csv")) read_poses_csv(entry.path());
                else read_scenario(entry.path());
                detail += fmt("accepted:%s;", name.c_str());
            } catch (const ParseError&) {
                ++rejected;
            }
        }
        if (rejected != total || total < 10) ok = false;
        detail += fmt("corpus=%d/%d rejected;", rejected, total);
    }

    // CLI idempotence on a small dataset
    {
        ScenarioConfig tiny = default_scenario();
        tiny.aperture.count = 9;
        tiny.aperture.area = 36.0;
        tiny.intrinsics = Intrinsics(40.0, 40.0, 32.0, 32.0, 64, 64);
        tiny.grid = GridSpec{0.0, 0.0, 8.0, 8.0, 0.25};
        write_scenario(outdir / "tiny.json", tiny);
        auto run = [&](const std::vector<std::string>& args) {
            std::vector<const char*> argv = {"aos"};
            for (const auto& a : args) argv.push_back(a.c_str());
            return cli::run(static_cast<int>(argv.size()), argv.data());
        };
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        };
        const fs::path d1 = outdir / "ds1";
        const fs::path d2 = outdir / "ds2";
        const int r1 = run({"simulate", "--scenario", (outdir / "tiny.json").string(), "--out", d1.string()});
        const int r2 = run({"simulate", "--scenario", (outdir / "tiny.json").string(), "--out", d2.string()});
        const int r3 = run({"integrate", "--dataset", d1.string(), "--d", "30", "--out",
                            (outdir / "i1.pgm").string()});
        const int r4 = run({"integrate", "--dataset", d1.string(), "--d", "30", "--out",
                            (outdir / "i2.pgm").string()});
        const bool same = slurp(d1 / "poses.csv") == slurp(d2 / "poses.csv") &&
                          slurp(d1 / "images" / "im000003.pgm") == slurp(d2 / "images" / "im000003.pgm") &&
                          slurp(outdir / "i1.pgm") == slurp(outdir / "i2.pgm");
        if (r1 != 0 || r2 != 0 || r3 != 0 || r4 != 0 || !same) {
            ok = false;
            detail += "cli_idempotence_FAIL;";
        } else {
            detail += "cli=idempotent;";
        }
    }

    report(8, "format round-trips, corrupt corpus rejection, CLI idempotence", ok, detail);
}

}  // namespace

int main() {
    const double t0 = now_s();
    const fs::path outdir =
        fs::temp_directory_path() / ("aos_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(outdir);

    printf("building shared dataset (340 recordings + %d-point d-sweep)...\n", 33);
    fflush(stdout);
    const SharedData shared = build_shared();
    printf("shared data ready in %.1fs\n", now_s() - t0);
    fflush(stdout);

    criterion1_model(0);
    criterion2_proxy(shared);
    criterion3_metrics(shared, outdir);
    criterion4_optimizers(shared);
    criterion5_test_functions();
    criterion6_performance(shared);
    criterion7_integral_invariants(shared);
    criterion8_io(outdir);

    fs::remove_all(outdir);
    printf("acceptance total: %.1fs, %d criterion(s) failed\n", now_s() - t0, g_failures);
    return g_failures == 0 ? 0 : 1;
}
