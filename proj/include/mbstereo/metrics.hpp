#ifndef MBSTEREO_METRICS_HPP
#define MBSTEREO_METRICS_HPP

#include "core.hpp"
#include "geometry.hpp"
#include "masks.hpp"
#include "photometric.hpp"

#include <array>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mbstereo {

inline constexpr double kDefaultOutlierPx = 3.0;

// ---------------------------------------------------------------------------
// Disparity metrics
//
// Pixels without valid ground truth are ignored everywhere. EPE averages over pixels that also
// carry a valid prediction; outlier rates count a missing prediction as an outlier.

struct RegionStats {
    std::size_t pixels = 0;            // valid-GT pixels in the region
    std::size_t predicted = 0;         // of those, pixels with a valid prediction
    std::optional<double> epe;         // absent when nothing was predicted
    double outlier_fraction = 0.0;     // |d - d_gt| > outlier_px, in [0,1]
    double d1_percent = 0.0;           // KITTI D1: error > 3 px and > 5% of d_gt, in percent
};

inline bool d1_outlier(double err, double gt) { return err > 3.0 && err > 0.05 * gt; }

/// Throws if the selection contains no valid-GT pixel.
inline RegionStats region_disparity_stats(const DisparityMap& pred, const DisparityMap& gt, const Mask* selection,
                                          double outlier_px = kDefaultOutlierPx) {
    require(pred.width == gt.width && pred.height == gt.height, "disparity metrics: dimension mismatch");
    if (selection) require(selection->same_shape(gt.width, gt.height), "disparity metrics: mask dimension mismatch");
    RegionStats s;
    double err_sum = 0.0;
    std::size_t outliers = 0, d1 = 0;
    for (std::size_t i = 0; i < gt.values.size(); ++i) {
        if (!gt.valid[i] || (selection && !selection->data[i])) continue;
        ++s.pixels;
        if (!pred.valid[i]) {
            ++outliers;
            ++d1;
            continue;
        }
        ++s.predicted;
        const double g = gt.values[i];
        const double err = std::abs(static_cast<double>(pred.values[i]) - g);
        err_sum += err;
        if (err > outlier_px) ++outliers;
        if (d1_outlier(err, g)) ++d1;
    }
    if (s.pixels == 0) throw InvalidArgument("disparity metrics: empty region");
    if (s.predicted > 0) s.epe = err_sum / static_cast<double>(s.predicted);
    s.outlier_fraction = static_cast<double>(outliers) / static_cast<double>(s.pixels);
    s.d1_percent = 100.0 * static_cast<double>(d1) / static_cast<double>(s.pixels);
    return s;
}

/// Region-wise breakdown over all/occ/oof/noc. Regions with no valid-GT pixel are omitted.
inline std::vector<std::pair<std::string, RegionStats>> disparity_metrics(const DisparityMap& pred,
                                                                          const DisparityMap& gt,
                                                                          const RegionMasks* masks = nullptr,
                                                                          double outlier_px = kDefaultOutlierPx) {
    std::vector<std::pair<std::string, const Mask*>> regions{{"all", nullptr}};
    Mask noc;
    if (masks) {
        noc = masks->noc();
        regions.emplace_back("occ", &masks->occ);
        regions.emplace_back("oof", &masks->oof);
        regions.emplace_back("noc", &noc);
    }
    std::vector<std::pair<std::string, RegionStats>> out;
    for (const auto& [name, sel] : regions) {
        bool any = false;
        for (std::size_t i = 0; i < gt.valid.size() && !any; ++i) any = gt.valid[i] && (!sel || sel->data[i]);
        if (any) out.emplace_back(name, region_disparity_stats(pred, gt, sel, outlier_px));
    }
    return out;
}

/// KITTI D1 outlier percentage over the selection.
inline double d1_rate(const DisparityMap& pred, const DisparityMap& gt, const Mask* selection = nullptr) {
    return region_disparity_stats(pred, gt, selection).d1_percent;
}

// ---------------------------------------------------------------------------
// Image quality

/// 10 log10(1 / MSE) for [0,1] images; +inf for identical images.
inline double psnr(const Image& a, const Image& b) {
    require_same_shape(a, b, "psnr");
    require(!a.data.empty(), "psnr: empty image");
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / (se / static_cast<double>(a.data.size())));
}

/// Normalized 11x11 Gaussian (sigma 1.5) as a separable 1-D kernel.
inline std::vector<double> gaussian_kernel(int size = 11, double sigma = 1.5) {
    std::vector<double> k(static_cast<std::size_t>(size));
    const int r = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        k[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

/// Classic SSIM map: 11x11 Gaussian window, sigma 1.5, reflective borders, channel-averaged.
inline Grid<double> ssim_map_gaussian(const Image& a, const Image& b) {
    require_same_shape(a, b, "ssim");
    const auto k = gaussian_kernel();
    const int r = static_cast<int>(k.size()) / 2;
    const int w = a.width, h = a.height;
    Grid<double> out(w, h, 0.0);
    // Separable filtering of the five moment images.
    std::array<Grid<double>, 5> src, tmp, flt;
    for (auto* g : {&src, &tmp, &flt})
        for (auto& m : *g) m = Grid<double>(w, h, 0.0);
    for (int c = 0; c < a.channels; ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double va = a.at(x, y, c), vb = b.at(x, y, c);
                src[0](x, y) = va;
                src[1](x, y) = vb;
                src[2](x, y) = va * va;
                src[3](x, y) = vb * vb;
                src[4](x, y) = va * vb;
            }
        for (int m = 0; m < 5; ++m) {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double s = 0.0;
                    for (int i = -r; i <= r; ++i) s += k[i + r] * src[m](reflect_index(x + i, w), y);
                    tmp[m](x, y) = s;
                }
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double s = 0.0;
                    for (int i = -r; i <= r; ++i) s += k[i + r] * tmp[m](x, reflect_index(y + i, h));
                    flt[m](x, y) = s;
                }
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double mu_a = flt[0].data[i], mu_b = flt[1].data[i];
            out.data[i] += ssim_from_moments(mu_a, mu_b, flt[2].data[i] - mu_a * mu_a, flt[3].data[i] - mu_b * mu_b,
                                             flt[4].data[i] - mu_a * mu_b);
        }
    }
    for (auto& v : out.data) v /= a.channels;
    return out;
}

inline double ssim(const Image& a, const Image& b) {
    require(a.width > 0 && a.height > 0, "ssim: empty image");
    const auto m = ssim_map_gaussian(a, b);
    double s = 0.0;
    for (double v : m.data) s += v;
    return s / static_cast<double>(m.size());
}

// ---------------------------------------------------------------------------
// Stereo consistency proxies

/// Mean photometric error between `left` and `right` warped to the left under `gt` (scale 1).
inline double warp_error(const Image& left, const Image& right, const DisparityMap& gt, double alpha = kDefaultAlpha) {
    require_same_shape(left, right, "warp_error");
    const WarpResult wr = warp_to_left(right, gt, 1.0);
    const auto err = photometric_error(left, wr.image, alpha);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < err.size(); ++i)
        if (wr.valid.data[i]) {
            s += err.data[i];
            ++n;
        }
    if (n == 0) throw InvalidArgument("warp_error: no valid pixels");
    return s / static_cast<double>(n);
}

struct Cyclopean {
    Image image;
    Mask valid;
};

/// Grayscale average of the left image and the right image warped onto it. Where the warp is
/// invalid the left grayscale value is used and the pixel is flagged invalid.
inline Cyclopean cyclopean_image(const Image& left, const Image& right, const DisparityMap& gt) {
    require_same_shape(left, right, "cyclopean_image");
    const WarpResult wr = warp_to_left(right, gt, 1.0);
    const Image gl = to_gray(left), gw = to_gray(wr.image);
    Cyclopean c{Image(left.width, left.height, 1), wr.valid};
    for (std::size_t i = 0; i < gl.data.size(); ++i)
        c.image.data[i] = c.valid.data[i] ? 0.5f * (gl.data[i] + gw.data[i]) : gl.data[i];
    return c;
}

/// SSIM between the cyclopean images of two stereo pairs, averaged over mutually valid pixels.
inline double fusion_ssim(const std::pair<Image, Image>& pair_a, const std::pair<Image, Image>& pair_b,
                          const DisparityMap& gt) {
    const auto ca = cyclopean_image(pair_a.first, pair_a.second, gt);
    const auto cb = cyclopean_image(pair_b.first, pair_b.second, gt);
    require_same_shape(ca.image, cb.image, "fusion_ssim");
    const auto m = ssim_map_gaussian(ca.image, cb.image);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (ca.valid.data[i] && cb.valid.data[i]) {
            s += m.data[i];
            ++n;
        }
    if (n == 0) throw InvalidArgument("fusion_ssim: no valid overlap");
    return s / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Depth metrics (meters)

struct DepthMetrics {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

inline constexpr double kDepthThreshold = 1.25;

/// AbsRel, SqRel, RMSE, RMSE(log) with natural log, and the fraction of pixels with
/// max(d/d_gt, d_gt/d) < 1.25^k for k = 1..3.
inline DepthMetrics depth_metrics(const Grid<double>& pred, const Grid<double>& gt, const Mask& valid) {
    require(pred.same_shape(gt.width, gt.height) && valid.same_shape(gt.width, gt.height),
            "depth_metrics: dimension mismatch");
    DepthMetrics m;
    std::size_t n = 0;
    double se = 0.0, sle = 0.0;
    std::size_t a1 = 0, a2 = 0, a3 = 0;
    const double t1 = kDepthThreshold, t2 = t1 * t1, t3 = t2 * t1;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (!valid.data[i]) continue;
        const double p = pred.data[i], g = gt.data[i];
        if (!(p > 0.0) || !(g > 0.0) || !std::isfinite(p) || !std::isfinite(g))
            throw InvalidArgument("depth_metrics: nonpositive depth in valid region");
        ++n;
        const double diff = p - g;
        m.abs_rel += std::abs(diff) / g;
        m.sq_rel += diff * diff / g;
        se += diff * diff;
        const double ld = std::log(p) - std::log(g);
        sle += ld * ld;
        const double delta = std::max(p / g, g / p);
        a1 += delta < t1;
        a2 += delta < t2;
        a3 += delta < t3;
    }
    if (n == 0) throw InvalidArgument("depth_metrics: empty selection");
    const double nn = static_cast<double>(n);
    m.abs_rel /= nn;
    m.sq_rel /= nn;
    m.rmse = std::sqrt(se / nn);
    m.rmse_log = std::sqrt(sle / nn);
    m.a1 = static_cast<double>(a1) / nn;
    m.a2 = static_cast<double>(a2) / nn;
    m.a3 = static_cast<double>(a3) / nn;
    return m;
}

/// Depth = focal_baseline / disparity on valid pixels with positive disparity.
inline std::pair<Grid<double>, Mask> disparity_to_depth(const DisparityMap& d, double focal_baseline) {
    require(focal_baseline > 0.0, "disparity_to_depth: focal*baseline must be positive");
    Grid<double> depth(d.width, d.height, 0.0);
    Mask valid(d.width, d.height, 0);
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (d.valid[i] && d.values[i] > 0.0f) {
            depth.data[i] = focal_baseline / d.values[i];
            valid.data[i] = 1;
        }
    return {depth, valid};
}

// ---------------------------------------------------------------------------
// Report

/// Collected evaluation results. Sections that were not computed are absent.
struct MetricsReport {
    std::vector<std::pair<std::string, RegionStats>> regions;
    std::optional<double> psnr;
    std::optional<double> ssim;
    std::optional<double> warp_error;
    std::optional<double> fusion_ssim;
    std::optional<DepthMetrics> depth;
};

inline std::string format_metric(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// `key = value` lines in a fixed order.
inline std::string format_report(const MetricsReport& r) {
    std::ostringstream os;
    for (const auto& [name, s] : r.regions) {
        const std::string p = "disparity." + name + ".";
        os << p << "pixels = " << s.pixels << "\n";
        os << p << "predicted = " << s.predicted << "\n";
        if (s.epe) os << p << "epe = " << format_metric(*s.epe) << "\n";
        os << p << "outlier_3px = " << format_metric(s.outlier_fraction) << "\n";
        os << p << "d1_percent = " << format_metric(s.d1_percent) << "\n";
    }
    if (r.psnr) os << "image.psnr = " << format_metric(*r.psnr) << "\n";
    if (r.ssim) os << "image.ssim = " << format_metric(*r.ssim) << "\n";
    if (r.warp_error) os << "stereo.warp_error = " << format_metric(*r.warp_error) << "\n";
    if (r.fusion_ssim) os << "stereo.fusion_ssim = " << format_metric(*r.fusion_ssim) << "\n";
    if (r.depth) {
        const auto& d = *r.depth;
        os << "depth.abs_rel = " << format_metric(d.abs_rel) << "\n"
           << "depth.sq_rel = " << format_metric(d.sq_rel) << "\n"
           << "depth.rmse = " << format_metric(d.rmse) << "\n"
           << "depth.rmse_log = " << format_metric(d.rmse_log) << "\n"
           << "depth.a1 = " << format_metric(d.a1) << "\n"
           << "depth.a2 = " << format_metric(d.a2) << "\n"
           << "depth.a3 = " << format_metric(d.a3) << "\n";
    }
    return os.str();
}

/// Piecewise-linear blue -> green -> yellow -> red ramp for t in [0,1].
inline std::array<float, 3> heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (t < 1.0 / 3.0) return {0.0f, static_cast<float>(3.0 * t), static_cast<float>(1.0 - 3.0 * t)};
    if (t < 2.0 / 3.0) return {static_cast<float>(3.0 * t - 1.0), 1.0f, 0.0f};
    return {1.0f, static_cast<float>(3.0 - 3.0 * t), 0.0f};
}

/// Heat map of a scalar grid; pixels outside `valid` are black.
inline Image heat_image(const Grid<double>& values, const Mask& valid, double max_value) {
    require(max_value > 0.0, "heat_image: max_value must be positive");
    Image img(values.width, values.height, 3, 0.0f);
    for (int y = 0; y < values.height; ++y)
        for (int x = 0; x < values.width; ++x) {
            if (!valid(x, y)) continue;
            const auto c = heat_color(values(x, y) / max_value);
            for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[k];
        }
    return img;
}

/// |pred - gt| heat map saturating at max_error pixels; missing predictions render at saturation.
inline Image disparity_error_image(const DisparityMap& pred, const DisparityMap& gt, double max_error = 5.0) {
    require(pred.width == gt.width && pred.height == gt.height, "disparity_error_image: dimension mismatch");
    Grid<double> err(gt.width, gt.height, 0.0);
    Mask valid(gt.width, gt.height, 0);
    for (std::size_t i = 0; i < gt.values.size(); ++i) {
        if (!gt.valid[i]) continue;
        valid.data[i] = 1;
        err.data[i] = pred.valid[i] ? std::abs(static_cast<double>(pred.values[i]) - gt.values[i]) : max_error;
    }
    return heat_image(err, valid, max_error);
}

}  // namespace mbstereo

#endif
