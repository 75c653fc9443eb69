#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "aos/focus_metrics.hpp"
#include "aos/geometry.hpp"
#include "aos/grid.hpp"
#include "aos/image.hpp"
#include "aos/integrator.hpp"

// Maximizers for focus objectives over the focal-plane parameters
// (d, theta, phi): a box-constrained SQP-style local method (damped BFGS
// model, active-set quadratic subproblem, Armijo backtracking), a scatter
// search for global runs without a useful initial guess, and an exhaustive
// grid search used as the oracle in tests. All of them report cost as exact
// objective-evaluation counts; nothing is evaluated outside the trace.

namespace aos {

using ParamVec = std::array<double, 3>;  // d [m], theta [rad], phi [rad]
using Objective = std::function<double(const ParamVec&)>;

struct Bounds {
    ParamVec lower{};
    ParamVec upper{};

    void validate() const {
        for (int i = 0; i < 3; ++i)
            if (!(lower[i] < upper[i]))
                throw std::invalid_argument("Bounds: lower must be strictly below upper");
    }
    bool contains(const ParamVec& x) const {
        for (int i = 0; i < 3; ++i)
            if (x[i] < lower[i] || x[i] > upper[i]) return false;
        return true;
    }
    ParamVec clamp(const ParamVec& x) const {
        ParamVec r = x;
        for (int i = 0; i < 3; ++i) r[i] = std::clamp(r[i], lower[i], upper[i]);
        return r;
    }
    double span(int i) const { return upper[i] - lower[i]; }
};

struct OptOptions {
    int max_evals = 2000;
    double h_d = 0.1;                       // finite-difference step for d, meters
    double h_ang = deg_to_rad(0.25);        // finite-difference step for angles
    double eps_x = 1e-8;                    // step tolerance, relative to box span
    double eps_f = 1e-12;                   // objective improvement tolerance
    int population = 30;                    // scatter search diverse set P
    int ref_set = 10;                       // scatter search reference set b
    int refine_evals = 120;                 // per-round local refinement budget
    uint64_t seed = 0;

    void validate() const {
        if (max_evals < 1 || refine_evals < 1 || population < 1 || ref_set < 1)
            throw std::invalid_argument("OptOptions: counts must be positive");
        if (!(h_d > 0.0) || !(h_ang > 0.0) || !(eps_x > 0.0) || !(eps_f > 0.0))
            throw std::invalid_argument("OptOptions: steps and tolerances must be positive");
        if (ref_set > population)
            throw std::invalid_argument("OptOptions: ref_set cannot exceed population");
    }
};

struct TracePoint {
    ParamVec x{};
    double value = 0.0;
};

struct OptResult {
    ParamVec best_x{};
    double best_value = 0.0;
    int evals = 0;
    bool converged = false;
    std::vector<TracePoint> trace;           // every evaluation, in order
    std::vector<double> accepted_values;     // incumbent value after each accepted step
};

/// Exhaustive lattice search; steps[i] = 1 evaluates the box midpoint for
/// that variable, otherwise the lattice includes both bounds. Ties go to the
/// lowest lattice index (d-major, then theta, then phi).
OptResult grid_search(const Objective& objective, const Bounds& bounds,
                      const std::array<int, 3>& steps);

/// Local maximizer from x0 (must be inside bounds).
OptResult sqp_local(const Objective& objective, const ParamVec& x0, const Bounds& bounds,
                    const OptOptions& opts = {});

/// Global maximizer: Latin-hypercube diverse set, reference set combining
/// quality and max-min diversity, pairwise linear combinations, periodic
/// local refinement of the incumbent. Deterministic for a fixed seed.
OptResult scatter_search(const Objective& objective, const Bounds& bounds,
                         const OptOptions& opts = {});

/// Focus objective over focal-plane parameters: integrate, then score the
/// metric on roi. Calls are counted exactly once each; the referenced
/// recordings must outlive the objective.
class SfpObjective {
  public:
    SfpObjective(std::span<const ThermalImage> images, std::span<const CameraPose> poses,
                 const Intrinsics& intr, const Vec3& sap_origin, const GridSpec& grid,
                 MetricId metric, const Roi& roi, int workers = 0)
        : images_(images), poses_(poses), intr_(intr), sap_origin_(sap_origin), grid_(grid),
          metric_(metric), roi_(roi), workers_(workers), count_(std::make_shared<long>(0)) {}

    double operator()(const ParamVec& x) const {
        ++*count_;
        const SfpParams sfp(x[0], x[1], x[2]);
        const IntegralImage img =
            integrate(images_, poses_, intr_, sap_origin_, sfp, grid_, workers_);
        return focus_metric(metric_, img, roi_);
    }

    long evals() const { return *count_; }

  private:
    std::span<const ThermalImage> images_;
    std::span<const CameraPose> poses_;
    Intrinsics intr_;
    Vec3 sap_origin_;
    GridSpec grid_;
    MetricId metric_;
    Roi roi_;
    int workers_;
    std::shared_ptr<long> count_;
};

}  // namespace aos
