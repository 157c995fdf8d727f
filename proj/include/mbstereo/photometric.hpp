#ifndef MBSTEREO_PHOTOMETRIC_HPP
#define MBSTEREO_PHOTOMETRIC_HPP

#include "core.hpp"
#include "geometry.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mbstereo {

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr double kDefaultAlpha = 0.85;

/// SSIM from window statistics. Also used by the Gaussian-window variant in metrics.hpp.
inline double ssim_from_moments(double mu_a, double mu_b, double var_a, double var_b, double cov) {
    const double num = (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2);
    const double den = (mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2);
    return num / den;
}

/// Per-pixel SSIM over 3x3 uniform windows with reflective borders, averaged over channels.
inline Grid<double> ssim_map(const Image& a, const Image& b) {
    require_same_shape(a, b, "ssim_map");
    Grid<double> out(a.width, a.height, 0.0);
    const int w = a.width, h = a.height, nc = a.channels;
    std::vector<int> xs(3 * static_cast<std::size_t>(w)), ys(3 * static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x)
        for (int k = 0; k < 3; ++k) xs[3 * x + k] = reflect_index(x + k - 1, w);
    for (int y = 0; y < h; ++y)
        for (int k = 0; k < 3; ++k) ys[3 * y + k] = reflect_index(y + k - 1, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int c = 0; c < nc; ++c) {
                double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
                for (int ky = 0; ky < 3; ++ky) {
                    const int yy = ys[3 * y + ky];
                    for (int kx = 0; kx < 3; ++kx) {
                        const int xx = xs[3 * x + kx];
                        const double va = a.at(xx, yy, c);
                        const double vb = b.at(xx, yy, c);
                        sa += va;
                        sb += vb;
                        saa += va * va;
                        sbb += vb * vb;
                        sab += va * vb;
                    }
                }
                const double mu_a = sa / 9.0, mu_b = sb / 9.0;
                acc += ssim_from_moments(mu_a, mu_b, saa / 9.0 - mu_a * mu_a, sbb / 9.0 - mu_b * mu_b,
                                         sab / 9.0 - mu_a * mu_b);
            }
            out(x, y) = acc / nc;
        }
    }
    return out;
}

inline void require_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("photometric_error: alpha must lie in [0,1]");
}

/// L_pe = alpha/2 * (1 - SSIM) + (1 - alpha) * |a - b|, with the L1 term averaged over channels.
inline Grid<double> photometric_error(const Image& a, const Image& b, double alpha = kDefaultAlpha) {
    require_same_shape(a, b, "photometric_error");
    require_alpha(alpha);
    Grid<double> out = ssim_map(a, b);
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            double l1 = 0.0;
            for (int c = 0; c < a.channels; ++c)
                l1 += std::abs(static_cast<double>(a.at(x, y, c)) - static_cast<double>(b.at(x, y, c)));
            l1 /= a.channels;
            out(x, y) = alpha / 2.0 * (1.0 - out(x, y)) + (1.0 - alpha) * l1;
        }
    return out;
}

/// Per-pixel minimum warping loss. chosen[i] indexes the view in `labels`, -1 where invalid.
struct LossMap {
    Grid<double> values;
    Mask valid;
    Grid<int> chosen;
    std::vector<std::string> labels;

    std::optional<std::string> chosen_label(int x, int y) const {
        const int k = chosen(x, y);
        if (k < 0) return std::nullopt;
        return labels[static_cast<std::size_t>(k)];
    }
};

/// Loss of a single warped source against the target; valid where the warp is valid.
struct ViewLoss {
    Grid<double> values;
    Mask valid;
};

inline ViewLoss view_loss(const Image& target, const SourceView& source, const DisparityMap& disparity, double alpha) {
    const WarpResult warped = warp_to_left(source.image, disparity, source.scale);
    return {photometric_error(target, warped.image, alpha), warped.valid};
}

/// Per-source losses in ViewSet order.
inline std::vector<ViewLoss> per_view_losses(const ViewSet& views, const DisparityMap& disparity,
                                             double alpha = kDefaultAlpha) {
    views.validate();
    require_same_shape(views.target, disparity, "per_view_losses");
    require_alpha(alpha);
    std::vector<ViewLoss> out;
    out.reserve(views.sources.size());
    for (const auto& s : views.sources) out.push_back(view_loss(views.target, s, disparity, alpha));
    return out;
}

/// Reduces per-view losses with a per-pixel minimum over valid views. Ties keep the earlier view.
inline LossMap min_over_views(const std::vector<ViewLoss>& losses, std::vector<std::string> labels, int width,
                              int height) {
    LossMap m{Grid<double>(width, height, 0.0), Mask(width, height, 0), Grid<int>(width, height, -1),
              std::move(labels)};
    for (std::size_t k = 0; k < losses.size(); ++k) {
        const auto& l = losses[k];
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            if (!l.valid.data[i]) continue;
            if (!m.valid.data[i] || l.values.data[i] < m.values.data[i]) {
                m.values.data[i] = l.values.data[i];
                m.valid.data[i] = 1;
                m.chosen.data[i] = static_cast<int>(k);
            }
        }
    }
    return m;
}

/// Warps every source with D * s_i, scores it against the target and keeps the per-pixel minimum.
/// A pixel is invalid iff no source is valid there.
inline LossMap min_warping_loss(const ViewSet& views, const DisparityMap& disparity, double alpha = kDefaultAlpha) {
    if (views.sources.empty()) throw InvalidArgument("min_warping_loss: empty source list");
    const auto losses = per_view_losses(views, disparity, alpha);
    std::vector<std::string> labels;
    for (const auto& s : views.sources) labels.push_back(s.name);
    return min_over_views(losses, std::move(labels), views.target.width, views.target.height);
}

/// Mean over valid pixels, optionally restricted to `selection`. Throws on an empty selection.
inline double reduce_loss(const LossMap& map, const Mask* selection = nullptr) {
    if (selection && !selection->same_shape(map.values.width, map.values.height))
        throw InvalidArgument("reduce_loss: mask dimension mismatch");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid.data[i] || (selection && !selection->data[i])) continue;
        sum += map.values.data[i];
        ++n;
    }
    if (n == 0) throw InvalidArgument("reduce_loss: empty selection");
    return sum / static_cast<double>(n);
}

}  // namespace mbstereo

#endif
