#include "aos/integrator.hpp"

#include <cmath>

#include "aos/parallel.hpp"

namespace aos {

Roi central_roi(int width, int height, double fraction) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("central_roi: empty image");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("central_roi: fraction outside (0,1]");
    int w = static_cast<int>(std::floor(width * fraction));
    int h = static_cast<int>(std::floor(height * fraction));
    w = std::max(2, w - (w % 2));
    h = std::max(2, h - (h % 2));
    const int x0 = (width - w) / 2;
    const int y0 = (height - h) / 2;
    return Roi(x0, y0, x0 + w, y0 + h);
}

std::optional<double> sample_bilinear(const ThermalImage& img, double u, double v) {
    if (!(u >= 0.0) || !(v >= 0.0) || u > img.width - 1 || v > img.height - 1) return std::nullopt;
    int x0 = static_cast<int>(u);
    int y0 = static_cast<int>(v);
    if (x0 > img.width - 2) x0 = img.width - 2;   // u == width-1 lands on the last cell
    if (y0 > img.height - 2) y0 = img.height - 2;
    if (img.width == 1) x0 = 0;
    if (img.height == 1) y0 = 0;
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = u - x0;
    const double fy = v - y0;
    const double a = img.at(x0, y0);
    const double b = img.at(x1, y0);
    const double c = img.at(x0, y1);
    const double d = img.at(x1, y1);
    return (a * (1.0 - fx) + b * fx) * (1.0 - fy) + (c * (1.0 - fx) + d * fx) * fy;
}

IntegralImage integrate(std::span<const ThermalImage> images, std::span<const CameraPose> poses,
                        const Intrinsics& intr, const Vec3& sap_origin, const SfpParams& sfp,
                        const GridSpec& grid, int workers) {
    if (images.empty() || poses.empty()) throw std::invalid_argument("integrate: no recordings");
    if (images.size() != poses.size())
        throw std::invalid_argument("integrate: images/poses length mismatch");
    const Plane plane = sfp_plane(sfp, sap_origin);
    const GridFrame frame = GridFrame::from(grid, plane.point, sfp_plane_axes(sfp));
    if (frame.width <= 0 || frame.height <= 0)
        throw std::invalid_argument("integrate: grid resolves to zero pixels");

    const size_t n_cams = poses.size();
    std::vector<WorldToCamera> cams(n_cams);
    for (size_t k = 0; k < n_cams; ++k) cams[k] = WorldToCamera::from(poses[k]);

    IntegralImage out;
    out.width = frame.width;
    out.height = frame.height;
    out.grid = grid;
    out.sfp = sfp;
    out.mean.assign(static_cast<size_t>(frame.width) * frame.height, 0.0);
    out.count.assign(out.mean.size(), 0);

    parallel_for_chunks(0, frame.height, workers, [&](int y0, int y1) {
        const size_t w = static_cast<size_t>(frame.width);
        std::vector<double> sum(w), gx(w), gy(w), gz(w), us(w), vs(w);
        std::vector<int32_t> cnt(w);
        for (int iy = y0; iy < y1; ++iy) {
            std::fill(sum.begin(), sum.end(), 0.0);
            std::fill(cnt.begin(), cnt.end(), 0);
            for (int ix = 0; ix < frame.width; ++ix) {
                const Vec3 p = frame.at(ix, iy);
                gx[static_cast<size_t>(ix)] = p.x;
                gy[static_cast<size_t>(ix)] = p.y;
                gz[static_cast<size_t>(ix)] = p.z;
            }
            // The plane is horizontal when both in-plane axes have exactly
            // zero z; the row then sits at a single height, and for cameras
            // looking straight down the depth is one constant, so the
            // division hoists out of the pixel loop without changing bits.
            const bool row_flat = frame.axes.e1.z == 0.0 && frame.axes.e2.z == 0.0;
            // Camera-major over a row: each pixel still accumulates in
            // ascending camera order, which fixes the summation order. The
            // projection pass below evaluates the same expressions as
            // project_point / sample_bilinear, term for term, so this kernel
            // stays bit-identical to the single-sample route.
            for (size_t k = 0; k < n_cams; ++k) {
                const Mat3& r = cams[k].r;
                const Vec3 t = cams[k].t;
                const ThermalImage& im = images[k];
                const double ulim = im.width - 1;
                const double vlim = im.height - 1;
                if (row_flat && r.m[6] == 0.0 && r.m[7] == 0.0) {
                    const double dz = gz[0] - t.z;
                    const double cz0 = r.m[6] * (gx[0] - t.x) + r.m[7] * (gy[0] - t.y) + r.m[8] * dz;
                    if (!(cz0 > kMinCameraDepth)) continue;  // whole row behind this camera
                    const double inv_z = 1.0 / cz0;
                    const double ax = r.m[2] * dz;  // constant z terms of the rotation rows
                    const double ay = r.m[5] * dz;
                    for (size_t i = 0; i < w; ++i) {
                        const double dx = gx[i] - t.x;
                        const double dy = gy[i] - t.y;
                        const double u = intr.fx * ((r.m[0] * dx + r.m[1] * dy) + ax) * inv_z + intr.cx;
                        const double v = intr.fy * ((r.m[3] * dx + r.m[4] * dy) + ay) * inv_z + intr.cy;
                        const bool valid = (u >= 0.0) & (v >= 0.0) & (u <= ulim) & (v <= vlim);
                        us[i] = valid ? u : -1.0;  // sentinel: skipped below
                        vs[i] = v;
                    }
                } else {
                    for (size_t i = 0; i < w; ++i) {
                        const double dx = gx[i] - t.x;
                        const double dy = gy[i] - t.y;
                        const double dz = gz[i] - t.z;
                        const double cz = r.m[6] * dx + r.m[7] * dy + r.m[8] * dz;
                        const double inv_z = 1.0 / cz;  // masked below when cz is invalid
                        const double u = intr.fx * (r.m[0] * dx + r.m[1] * dy + r.m[2] * dz) * inv_z + intr.cx;
                        const double v = intr.fy * (r.m[3] * dx + r.m[4] * dy + r.m[5] * dz) * inv_z + intr.cy;
                        const bool valid = (cz > kMinCameraDepth) & (u >= 0.0) & (v >= 0.0) &
                                           (u <= ulim) & (v <= vlim);
                        us[i] = valid ? u : -1.0;
                        vs[i] = v;
                    }
                }
                const int max_x0 = im.width - 2;
                const int max_y0 = im.height - 2;
                if (max_x0 < 0 || max_y0 < 0) {
                    // Degenerate one-pixel-wide images fall back to the
                    // reference sampler.
                    for (size_t i = 0; i < w; ++i) {
                        if (us[i] < 0.0) continue;
                        if (const auto val = sample_bilinear(im, us[i], vs[i])) {
                            sum[i] += *val;
                            cnt[i] += 1;
                        }
                    }
                } else {
                    for (size_t i = 0; i < w; ++i) {
                        if (us[i] < 0.0) continue;
                        const double u = us[i];
                        const double v = vs[i];
                        const int x0 = std::min(static_cast<int>(u), max_x0);
                        const int y0p = std::min(static_cast<int>(v), max_y0);
                        const double fx = u - x0;
                        const double fy = v - y0p;
                        const float* row0 = im.pixels.data() + static_cast<size_t>(y0p) * im.width + x0;
                        const float* row1 = row0 + im.width;
                        const double a = row0[0];
                        const double b = row0[1];
                        const double c = row1[0];
                        const double d = row1[1];
                        sum[i] += (a * (1.0 - fx) + b * fx) * (1.0 - fy) + (c * (1.0 - fx) + d * fx) * fy;
                        cnt[i] += 1;
                    }
                }
            }
            const size_t row = static_cast<size_t>(iy) * w;
            for (size_t i = 0; i < w; ++i) {
                const int32_t c = cnt[i];
                out.count[row + i] = c;
                out.mean[row + i] = c > 0 ? sum[i] / c : 0.0;
            }
        }
    });
    return out;
}

RoiStats roi_stats(const IntegralImage& img, const Roi& roi) {
    if (roi.x0 < 0 || roi.y0 < 0 || roi.x1 > img.width || roi.y1 > img.height)
        throw std::invalid_argument("roi_stats: roi outside image bounds");
    double sum = 0.0;
    double sum_sq = 0.0;
    long valid = 0;
    for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1; ++x) {
            if (!img.valid_at(x, y)) continue;
            const double v = img.mean_at(x, y);
            sum += v;
            sum_sq += v * v;
            ++valid;
        }
    }
    if (valid == 0) throw std::runtime_error("roi_stats: roi has no covered pixels");
    const double mean = sum / valid;
    const double variance = std::max(0.0, sum_sq / valid - mean * mean);
    const double total = static_cast<double>(roi.width()) * roi.height();
    return RoiStats{mean, variance, static_cast<double>(valid) / total};
}

}  // namespace aos
