#include "aos/stat_model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aos/parallel.hpp"
#include "aos/rng.hpp"

namespace aos {

std::string_view family_name(DistFamily f) {
    switch (f) {
        case DistFamily::Gaussian: return "gaussian";
        case DistFamily::Uniform: return "uniform";
        case DistFamily::TwoPoint: return "two_point";
    }
    throw std::invalid_argument("family_name: unknown family");
}

DistFamily family_from_name(std::string_view name) {
    if (name == "gaussian") return DistFamily::Gaussian;
    if (name == "uniform") return DistFamily::Uniform;
    if (name == "two_point") return DistFamily::TwoPoint;
    throw std::invalid_argument("unknown distribution family: " + std::string(name));
}

void OcclusionModelParams::validate() const {
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("OcclusionModelParams: density outside [0,1]");
    if (samples < 1) throw std::invalid_argument("OcclusionModelParams: samples must be >= 1");
    if (var_s < 0.0 || var_f < 0.0)
        throw std::invalid_argument("OcclusionModelParams: variances must be non-negative");
}

double visibility_simple(double density, int samples) {
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("visibility_simple: density outside [0,1]");
    if (samples < 1) throw std::invalid_argument("visibility_simple: samples must be >= 1");
    const double d = density;
    const double n = static_cast<double>(samples);
    return 1.0 - d * d - d * (1.0 - d) / n;
}

double mse_closed_form(const OcclusionModelParams& p) {
    p.validate();
    const double d = p.density;
    const double n = static_cast<double>(p.samples);
    const double contrast = p.mu_f - p.mu_s;
    return (d * d + d * (1.0 - d) / n) * (p.var_s + contrast * contrast) + (d / n) * p.var_f;
}

double visibility_extended(const OcclusionModelParams& p) { return 1.0 - mse_closed_form(p); }

namespace {

// Draw from the requested family with the given mean and standard deviation.
// Uniform spans mu +- sqrt(3) sigma; two_point is mu +- sigma.
double draw(SplitMix64& rng, DistFamily family, double mu, double sigma) {
    if (sigma == 0.0) return mu;
    switch (family) {
        case DistFamily::Gaussian:
            return mu + sigma * rng.normal();
        case DistFamily::Uniform:
            return mu + sigma * 1.7320508075688772 * (2.0 * rng.uniform01() - 1.0);
        case DistFamily::TwoPoint:
            return (rng.next_u64() & 1ull) ? mu + sigma : mu - sigma;
    }
    throw std::invalid_argument("draw: unknown family");
}

constexpr long kChunkTrials = 1 << 16;

}  // namespace

MonteCarloEstimate mse_monte_carlo(const OcclusionModelParams& p, long trials, uint64_t seed,
                                   int workers) {
    p.validate();
    if (trials < 2) throw std::invalid_argument("mse_monte_carlo: trials must be >= 2");

    const double sigma_s = std::sqrt(p.var_s);
    const double sigma_f = std::sqrt(p.var_f);
    const int n = p.samples;
    const int chunks = static_cast<int>((trials + kChunkTrials - 1) / kChunkTrials);
    std::vector<double> chunk_sum(static_cast<size_t>(chunks), 0.0);
    std::vector<double> chunk_sum_sq(static_cast<size_t>(chunks), 0.0);

    parallel_for_chunks(0, chunks, workers, [&](int c0, int c1) {
        for (int c = c0; c < c1; ++c) {
            const long t0 = static_cast<long>(c) * kChunkTrials;
            const long t1 = std::min(trials, t0 + kChunkTrials);
            SplitMix64 rng(hash_combine(seed, static_cast<uint64_t>(c)));
            double sum = 0.0;
            double sum_sq = 0.0;
            for (long t = t0; t < t1; ++t) {
                const double s = draw(rng, p.family, p.mu_s, sigma_s);
                double acc = 0.0;
                int occluded = 0;
                for (int i = 0; i < n; ++i) {
                    if (rng.uniform01() < p.density) {
                        acc += draw(rng, p.family, p.mu_f, sigma_f);
                        ++occluded;
                    }
                }
                // occluded == 0 collapses to X = S exactly (no rounding residue)
                const double x =
                    occluded == 0 ? s : (acc + static_cast<double>(n - occluded) * s) / n;
                const double err = (x - s) * (x - s);
                sum += err;
                sum_sq += err * err;
            }
            chunk_sum[static_cast<size_t>(c)] = sum;
            chunk_sum_sq[static_cast<size_t>(c)] = sum_sq;
        }
    });

    double sum = 0.0;
    double sum_sq = 0.0;
    for (int c = 0; c < chunks; ++c) {  // fixed reduction order
        sum += chunk_sum[static_cast<size_t>(c)];
        sum_sq += chunk_sum_sq[static_cast<size_t>(c)];
    }
    const double mean = sum / static_cast<double>(trials);
    const double var_sample =
        std::max(0.0, (sum_sq - static_cast<double>(trials) * mean * mean) / static_cast<double>(trials - 1));
    return MonteCarloEstimate{mean, std::sqrt(var_sample / static_cast<double>(trials))};
}

ModelCheckReport model_check(const OcclusionModelParams& p, long trials, uint64_t seed, int workers) {
    ModelCheckReport report;
    report.params = p;
    report.trials = trials;
    report.closed_form_mse = mse_closed_form(p);
    const MonteCarloEstimate est = mse_monte_carlo(p, trials, seed, workers);
    report.mc_mse = est.estimate;
    report.mc_stderr = est.stderr_;
    report.pass = std::abs(report.closed_form_mse - report.mc_mse) <= 4.0 * report.mc_stderr;
    return report;
}

}  // namespace aos
