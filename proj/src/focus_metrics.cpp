#include "aos/focus_metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace aos {

std::string_view metric_name(MetricId id) {
    switch (id) {
        case MetricId::Glv: return "glv";
        case MetricId::NormalizedVariance: return "normalized_variance";
        case MetricId::SquaredGradient: return "squared_gradient";
        case MetricId::Tenengrad: return "tenengrad";
        case MetricId::LaplacianEnergy: return "laplacian_energy";
        case MetricId::ModifiedLaplacian: return "modified_laplacian";
        case MetricId::HaarDetailEnergy: return "haar_detail_energy";
    }
    throw std::invalid_argument("metric_name: unknown metric id");
}

MetricId metric_from_name(std::string_view name) {
    for (MetricId id : kAllMetrics)
        if (metric_name(id) == name) return id;
    throw std::invalid_argument("unknown metric name: " + std::string(name));
}

namespace {

void check_roi(const IntegralImage& img, const Roi& roi) {
    if (roi.x0 < 0 || roi.y0 < 0 || roi.x1 > img.width || roi.y1 > img.height)
        throw std::invalid_argument("focus_metric: roi outside image bounds");
}

// True when every pixel of the 3x3 window centered at (x, y) is covered.
bool window3_valid(const IntegralImage& img, int x, int y) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if (!img.valid_at(x + dx, y + dy)) return false;
    return true;
}

double squared_gradient(const IntegralImage& img, const Roi& roi) {
    if (roi.width() < 2) throw std::invalid_argument("squared_gradient: roi narrower than 2 px");
    double acc = 0.0;
    for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1 - 1; ++x) {
            if (!img.valid_at(x, y) || !img.valid_at(x + 1, y)) continue;
            const double d = img.mean_at(x + 1, y) - img.mean_at(x, y);
            acc += d * d;
        }
    }
    return acc;
}

double tenengrad(const IntegralImage& img, const Roi& roi) {
    if (roi.width() < 3 || roi.height() < 3)
        throw std::invalid_argument("tenengrad: roi smaller than the 3x3 kernel");
    double acc = 0.0;
    for (int y = roi.y0 + 1; y < roi.y1 - 1; ++y) {
        for (int x = roi.x0 + 1; x < roi.x1 - 1; ++x) {
            if (!window3_valid(img, x, y)) continue;
            const double gx = -img.mean_at(x - 1, y - 1) + img.mean_at(x + 1, y - 1) -
                              2.0 * img.mean_at(x - 1, y) + 2.0 * img.mean_at(x + 1, y) -
                              img.mean_at(x - 1, y + 1) + img.mean_at(x + 1, y + 1);
            const double gy = -img.mean_at(x - 1, y - 1) - 2.0 * img.mean_at(x, y - 1) -
                              img.mean_at(x + 1, y - 1) + img.mean_at(x - 1, y + 1) +
                              2.0 * img.mean_at(x, y + 1) + img.mean_at(x + 1, y + 1);
            acc += gx * gx + gy * gy;
        }
    }
    return acc;
}

double laplacian_energy(const IntegralImage& img, const Roi& roi) {
    if (roi.width() < 3 || roi.height() < 3)
        throw std::invalid_argument("laplacian_energy: roi smaller than the 3x3 kernel");
    double acc = 0.0;
    for (int y = roi.y0 + 1; y < roi.y1 - 1; ++y) {
        for (int x = roi.x0 + 1; x < roi.x1 - 1; ++x) {
            if (!window3_valid(img, x, y)) continue;
            const double lap = img.mean_at(x - 1, y) + img.mean_at(x + 1, y) +
                               img.mean_at(x, y - 1) + img.mean_at(x, y + 1) -
                               4.0 * img.mean_at(x, y);
            acc += lap * lap;
        }
    }
    return acc;
}

double modified_laplacian(const IntegralImage& img, const Roi& roi) {
    if (roi.width() < 3 || roi.height() < 3)
        throw std::invalid_argument("modified_laplacian: roi smaller than the 3x3 kernel");
    double acc = 0.0;
    for (int y = roi.y0 + 1; y < roi.y1 - 1; ++y) {
        for (int x = roi.x0 + 1; x < roi.x1 - 1; ++x) {
            if (!window3_valid(img, x, y)) continue;
            acc += std::abs(2.0 * img.mean_at(x, y) - img.mean_at(x - 1, y) - img.mean_at(x + 1, y)) +
                   std::abs(2.0 * img.mean_at(x, y) - img.mean_at(x, y - 1) - img.mean_at(x, y + 1));
        }
    }
    return acc;
}

double haar_detail_energy(const IntegralImage& img, const Roi& roi) {
    if (roi.width() < 2 || roi.height() < 2 || roi.width() % 2 != 0 || roi.height() % 2 != 0)
        throw std::invalid_argument("haar_detail_energy: roi dims must be even and >= 2");
    double acc = 0.0;
    for (int y = roi.y0; y < roi.y1; y += 2) {
        for (int x = roi.x0; x < roi.x1; x += 2) {
            if (!img.valid_at(x, y) || !img.valid_at(x + 1, y) || !img.valid_at(x, y + 1) ||
                !img.valid_at(x + 1, y + 1))
                continue;
            const double a = img.mean_at(x, y);
            const double b = img.mean_at(x + 1, y);
            const double c = img.mean_at(x, y + 1);
            const double d = img.mean_at(x + 1, y + 1);
            const double h = 0.5 * (a - b + c - d);
            const double v = 0.5 * (a + b - c - d);
            const double dg = 0.5 * (a - b - c + d);
            acc += h * h + v * v + dg * dg;
        }
    }
    return acc;
}

}  // namespace

double glv(const IntegralImage& img, const Roi& roi) {
    check_roi(img, roi);
    double sum = 0.0;
    double sum_sq = 0.0;
    long n = 0;
    for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1; ++x) {
            if (!img.valid_at(x, y)) continue;
            const double v = img.mean_at(x, y);
            sum += v;
            sum_sq += v * v;
            ++n;
        }
    }
    if (n < 2) throw std::runtime_error("glv: fewer than 2 covered pixels in roi");
    const double mean = sum / n;
    return std::max(0.0, sum_sq / n - mean * mean);
}

double focus_metric(MetricId id, const IntegralImage& img, const Roi& roi) {
    check_roi(img, roi);
    switch (id) {
        case MetricId::Glv:
            return glv(img, roi);
        case MetricId::NormalizedVariance: {
            const double v = glv(img, roi);
            const RoiStats st = roi_stats(img, roi);
            if (st.mean <= 1e-12)
                throw std::runtime_error("normalized_variance: roi mean too close to zero");
            return v / st.mean;
        }
        case MetricId::SquaredGradient:
            return squared_gradient(img, roi);
        case MetricId::Tenengrad:
            return tenengrad(img, roi);
        case MetricId::LaplacianEnergy:
            return laplacian_energy(img, roi);
        case MetricId::ModifiedLaplacian:
            return modified_laplacian(img, roi);
        case MetricId::HaarDetailEnergy:
            return haar_detail_energy(img, roi);
    }
    throw std::invalid_argument("focus_metric: unknown metric id");
}

}  // namespace aos
