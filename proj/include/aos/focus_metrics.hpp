#pragma once

#include <array>
#include <string>
#include <string_view>

#include "aos/integrator.hpp"

// Focus metrics over integral images: the gray-level variance objective plus
// two representatives each from the gradient, Laplacian, variance and
// wavelet families. Pixels without coverage are excluded together with any
// kernel window that touches them; zero-filling would fake gradients at
// coverage borders.

namespace aos {

enum class MetricId {
    Glv,
    NormalizedVariance,
    SquaredGradient,
    Tenengrad,
    LaplacianEnergy,
    ModifiedLaplacian,
    HaarDetailEnergy,
};

inline constexpr std::array<MetricId, 7> kAllMetrics = {
    MetricId::Glv,           MetricId::NormalizedVariance, MetricId::SquaredGradient,
    MetricId::Tenengrad,     MetricId::LaplacianEnergy,    MetricId::ModifiedLaplacian,
    MetricId::HaarDetailEnergy,
};

/// Canonical lowercase identifier used on the CLI and in CSV headers.
std::string_view metric_name(MetricId id);
MetricId metric_from_name(std::string_view name);

/// Population gray-level variance over the valid pixels in roi; needs at
/// least two of them.
double glv(const IntegralImage& img, const Roi& roi);

double focus_metric(MetricId id, const IntegralImage& img, const Roi& roi);

}  // namespace aos
