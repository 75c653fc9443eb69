#pragma once

#include <cstdint>
#include <string_view>

// Closed-form occlusion statistics for synthetic-aperture integrals and a
// Monte Carlo oracle that realizes the underlying random process directly.
// The model: a pixel of the integral averages N samples, each of which is
// an occluder value F (probability D) or the target signal S (probability
// 1 - D); S is drawn once per pixel, occlusion events are i.i.d.
//
//   MSE  = (D^2 + D(1-D)/N) (var_s + (mu_f - mu_s)^2) + (D/N) var_f
//   V    = 1 - MSE
//
// Only the first and second moments of S and F enter the closed form, which
// the oracle verifies by swapping distribution families of equal moments.

namespace aos {

enum class DistFamily { Gaussian, Uniform, TwoPoint };

std::string_view family_name(DistFamily f);
DistFamily family_from_name(std::string_view name);

struct OcclusionModelParams {
    double density = 0.5;  // D
    int samples = 1;       // N
    double mu_s = 0.0;
    double var_s = 0.0;
    double mu_f = 1.0;
    double var_f = 0.0;
    DistFamily family = DistFamily::Gaussian;

    void validate() const;
};

/// V = 1 - D^2 - D(1-D)/N, the uniform-target binary-occluder special case.
double visibility_simple(double density, int samples);

double mse_closed_form(const OcclusionModelParams& p);

/// 1 - mse_closed_form.
double visibility_extended(const OcclusionModelParams& p);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

/// Simulates the per-pixel process for `trials` pixels and returns the
/// sample mean of (X - S)^2 with its standard error. Draws are unclipped so
/// moments are exact. Trials are split into fixed-size chunks with
/// chunk-seeded substreams and reduced in chunk order, so the estimate is
/// bit-identical for any worker count.
MonteCarloEstimate mse_monte_carlo(const OcclusionModelParams& p, long trials, uint64_t seed,
                                   int workers = 0);

struct ModelCheckReport {
    OcclusionModelParams params;
    double closed_form_mse = 0.0;
    double mc_mse = 0.0;
    double mc_stderr = 0.0;
    long trials = 0;
    bool pass = false;  // |closed - mc| <= 4 stderr
};

ModelCheckReport model_check(const OcclusionModelParams& p, long trials, uint64_t seed,
                             int workers = 0);

}  // namespace aos
