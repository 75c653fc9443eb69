#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "aos/stat_model.hpp"

using namespace aos;

namespace {

// The worked parameter set used across the model tests:
// (D=0.5, N=10, var_s=0.04, mu_s=0.2, mu_f=0.35, var_f=0.0025)
//   MSE = (0.25 + 0.025) * (0.04 + 0.15^2) + 0.05 * 0.0025
//       = 0.275 * 0.0625 + 0.000125 = 0.0173125
OcclusionModelParams worked_params(DistFamily family = DistFamily::Gaussian) {
    return OcclusionModelParams{0.5, 10, 0.2, 0.04, 0.35, 0.0025, family};
}

}  // namespace

TEST_SUITE("stat_model") {

TEST_CASE("visibility_simple boundary and midpoint values") {
    CHECK(visibility_simple(0.0, 1) == doctest::Approx(1.0));
    CHECK(visibility_simple(0.0, 100) == doctest::Approx(1.0));
    CHECK(visibility_simple(1.0, 1) == doctest::Approx(0.0));
    CHECK(visibility_simple(1.0, 50) == doctest::Approx(0.0));
    CHECK(visibility_simple(0.5, 1) == doctest::Approx(0.5));
    // N -> infinity limit: 1 - D^2
    CHECK(visibility_simple(0.5, 1000000) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK_THROWS_AS(visibility_simple(1.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(visibility_simple(0.5, 0), std::invalid_argument);
}

TEST_CASE("mse_closed_form reduces to 1 - visibility_simple for binary occluders") {
    for (double d : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
        for (int n : {1, 2, 5, 10, 100}) {
            const OcclusionModelParams p{d, n, 0.0, 0.0, 1.0, 0.0, DistFamily::Gaussian};
            CHECK(mse_closed_form(p) == doctest::Approx(1.0 - visibility_simple(d, n)).epsilon(1e-15));
        }
    }
}

TEST_CASE("mse_closed_form worked example and binary corner") {
    CHECK(mse_closed_form(worked_params()) == doctest::Approx(0.0173125).epsilon(1e-15));
    const OcclusionModelParams corner{1.0, 1, 0.0, 0.0, 1.0, 0.0, DistFamily::Gaussian};
    CHECK(mse_closed_form(corner) == doctest::Approx(1.0));
    CHECK(visibility_extended(corner) == doctest::Approx(0.0));
}

TEST_CASE("visibility_extended mirrors the closed form and decreases in D") {
    CHECK(visibility_extended(worked_params()) == doctest::Approx(1.0 - 0.0173125));
    OcclusionModelParams p = worked_params();
    double prev = 2.0;
    for (int i = 0; i <= 20; ++i) {
        p.density = i / 20.0;
        const double v = visibility_extended(p);
        CHECK(v < prev + 1e-15);
        prev = v;
    }
    // V independent of N when D = 0
    OcclusionModelParams q = worked_params();
    q.density = 0.0;
    q.samples = 1;
    const double v1 = visibility_extended(q);
    q.samples = 1000;
    CHECK(visibility_extended(q) == v1);
}

TEST_CASE("mse is exactly affine in var_s with the occlusion-level slope") {
    OcclusionModelParams p = worked_params();
    const double slope = 0.5 * 0.5 + 0.5 * 0.5 / 10.0;  // D^2 + D(1-D)/N
    p.var_s = 0.0;
    const double m0 = mse_closed_form(p);
    p.var_s = 0.01;
    const double m1 = mse_closed_form(p);
    p.var_s = 0.02;
    const double m2 = mse_closed_form(p);
    CHECK(std::abs((m1 - m0) - (m2 - m1)) <= 1e-15);             // collinear
    CHECK((m2 - m0) / 0.02 == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("monte carlo degenerate cases are exact") {
    OcclusionModelParams none = worked_params();
    none.density = 0.0;
    const auto e0 = mse_monte_carlo(none, 1000, 1);
    CHECK(e0.estimate == 0.0);

    const OcclusionModelParams full{1.0, 1, 0.0, 0.0, 1.0, 0.0, DistFamily::Gaussian};
    const auto e1 = mse_monte_carlo(full, 1000, 1);
    CHECK(e1.estimate == doctest::Approx(1.0));
    CHECK_THROWS_AS(mse_monte_carlo(full, 1, 1), std::invalid_argument);
}

TEST_CASE("monte carlo agrees with the closed form on the worked example") {
    const long trials = 200000;
    for (DistFamily family : {DistFamily::Gaussian, DistFamily::Uniform, DistFamily::TwoPoint}) {
        const OcclusionModelParams p = worked_params(family);
        const auto est = mse_monte_carlo(p, trials, 99, 2);
        CHECK_MESSAGE(std::abs(est.estimate - 0.0173125) <= 4.0 * est.stderr_,
                      "family ", family_name(family), " est ", est.estimate, " se ", est.stderr_);
    }
}

TEST_CASE("monte carlo estimate is independent of the worker count") {
    const OcclusionModelParams p = worked_params();
    const auto a = mse_monte_carlo(p, 100000, 7, 1);
    const auto b = mse_monte_carlo(p, 100000, 7, 4);
    CHECK(a.estimate == b.estimate);  // chunk reduction order is fixed
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("distribution families with matched moments agree") {
    const long trials = 200000;
    const auto g = mse_monte_carlo(worked_params(DistFamily::Gaussian), trials, 4, 2);
    const auto t = mse_monte_carlo(worked_params(DistFamily::TwoPoint), trials, 5, 2);
    const double joint = std::sqrt(g.stderr_ * g.stderr_ + t.stderr_ * t.stderr_);
    CHECK(std::abs(g.estimate - t.estimate) <= 4.0 * joint);
}

TEST_CASE("model_check passes the worked example and catches a corrupted form") {
    const auto rep = model_check(worked_params(), 200000, 11, 2);
    CHECK(rep.pass);
    CHECK(rep.closed_form_mse == doctest::Approx(0.0173125));

    // D=0 corner: both sides identically zero
    OcclusionModelParams zero = worked_params();
    zero.density = 0.0;
    CHECK(model_check(zero, 1000, 1).pass);

    // Dropping the (D/N) var_f term must blow past 4 sigma at these trials.
    OcclusionModelParams sensitive{0.5, 2, 0.0, 0.0, 0.5, 0.01, DistFamily::Gaussian};
    const auto est = mse_monte_carlo(sensitive, 1000000, 13, 2);
    const double corrupted = mse_closed_form(sensitive) -
                             (sensitive.density / sensitive.samples) * sensitive.var_f;
    CHECK(std::abs(corrupted - est.estimate) > 4.0 * est.stderr_);
}

TEST_CASE("parameter validation") {
    OcclusionModelParams p = worked_params();
    p.density = -0.1;
    CHECK_THROWS_AS(mse_closed_form(p), std::invalid_argument);
    p = worked_params();
    p.samples = 0;
    CHECK_THROWS_AS(mse_closed_form(p), std::invalid_argument);
    p = worked_params();
    p.var_f = -1.0;
    CHECK_THROWS_AS(mse_closed_form(p), std::invalid_argument);
}

}  // TEST_SUITE
