#ifndef MBSTEREO_REFERENCE_HPP
#define MBSTEREO_REFERENCE_HPP

// Deliberately naive reference implementations used as test oracles. They recompute every
// quantity per pixel straight from the definitions (no intermediate maps, no threading) while
// keeping the floating-point evaluation order of the fast paths, so results compare bit-exactly.
// Intended for small inputs only.

#include "core.hpp"
#include "geometry.hpp"
#include "photometric.hpp"

#include <bit>
#include <limits>
#include <utility>

namespace mbstereo::reference {

/// Mirror without edge repeat, written independently of core's helper.
inline int mirror(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
}

/// Value of `source` warped to the left view at (x, y) under the constant disparity d; the
/// second member is false where the sample leaves the frame (the warped value is then 0).
inline std::pair<float, bool> warped_sample(const Image& source, double scale, double d, int x, int y, int c) {
    const double u = x - scale * d;
    if (!(u >= 0.0 && u <= source.width - 1)) return {0.0f, false};
    const int i = std::min(static_cast<int>(std::floor(u)), source.width - 1);
    const int j = std::min(i + 1, source.width - 1);
    const double f = u - i;
    const double a = source.at(i, y, c), b = source.at(j, y, c);
    return {f == 0.0 ? static_cast<float>(a) : static_cast<float>(a + f * (b - a)), true};
}

/// 3x3 reflective-window SSIM between the target and a source warped by constant d, at one pixel.
inline double ssim_at(const Image& target, const Image& source, double scale, double d, int x, int y) {
    double acc = 0.0;
    for (int c = 0; c < target.channels; ++c) {
        double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = mirror(x + dx, target.width), yy = mirror(y + dy, target.height);
                const double va = target.at(xx, yy, c);
                const double vb = warped_sample(source, scale, d, xx, yy, c).first;
                sa += va;
                sb += vb;
                saa += va * va;
                sbb += vb * vb;
                sab += va * vb;
            }
        const double ma = sa / 9.0, mb = sb / 9.0;
        const double va = saa / 9.0 - ma * ma, vb = sbb / 9.0 - mb * mb, cv = sab / 9.0 - ma * mb;
        acc += ((2.0 * ma * mb + kSsimC1) * (2.0 * cv + kSsimC2)) /
               ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
    }
    return acc / target.channels;
}

/// Minimum over sources of the photometric loss at one pixel under constant disparity d.
/// Returns false when no source sample is in frame.
inline bool min_loss_at(const ViewSet& views, double alpha, int d, int x, int y, double& loss) {
    bool any = false;
    for (const auto& s : views.sources) {
        if (!warped_sample(s.image, s.scale, d, x, y, 0).second) continue;
        double l1 = 0.0;
        for (int c = 0; c < views.target.channels; ++c)
            l1 += std::abs(static_cast<double>(views.target.at(x, y, c)) -
                           static_cast<double>(warped_sample(s.image, s.scale, d, x, y, c).first));
        l1 /= views.target.channels;
        const double v =
            alpha / 2.0 * (1.0 - ssim_at(views.target, s.image, s.scale, d, x, y)) + (1.0 - alpha) * l1;
        if (!any || v < loss) loss = v;
        any = true;
    }
    return any;
}

/// Triple loop over pixels, candidates and window offsets implementing photometric_match.
inline DisparityMap photometric_match(const ViewSet& views, int d_max, double alpha = kDefaultAlpha, int window = 5) {
    const int w = views.target.width, h = views.target.height, r = window / 2;
    DisparityMap out(w, h, 0.0f, false);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double best = std::numeric_limits<double>::infinity();
            int best_d = -1;
            for (int d = 0; d < d_max; ++d) {
                double centre = 0.0;
                if (!min_loss_at(views, alpha, d, x, y, centre)) continue;
                double sum = 0.0;
                int n = 0;
                for (int yy = y - r; yy <= y + r; ++yy)
                    for (int xx = x - r; xx <= x + r; ++xx) {
                        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                        double v = 0.0;
                        if (!min_loss_at(views, alpha, d, xx, yy, v)) continue;
                        sum += v;
                        ++n;
                    }
                const double agg = sum / n;
                if (agg < best) {
                    best = agg;
                    best_d = d;
                }
            }
            if (best_d >= 0) out.set(x, y, static_cast<float>(best_d));
        }
    return out;
}

/// Census Hamming cost at one (pixel, candidate), comparing window neighbourhoods directly.
/// Returns -1 when the source abscissa leaves the frame.
inline int census_cost_at(const Image& target_gray, const Image& source_gray, double scale, int d, int window, int x,
                          int y) {
    const int w = target_gray.width, h = target_gray.height, r = window / 2;
    const double shifted = x - scale * d;
    const long u = static_cast<long>(std::floor(shifted + 0.5));
    if (u < 0 || u >= w) return -1;
    const auto px = [&](const Image& g, long cx, int cy, int dx, int dy) {
        const long xx = std::max(0L, std::min<long>(w - 1, cx + dx));
        const int yy = std::max(0, std::min(h - 1, cy + dy));
        return g.at(static_cast<int>(xx), yy);
    };
    int cost = 0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const bool bt = px(target_gray, x, y, dx, dy) < target_gray.at(x, y);
            const bool bs = px(source_gray, u, y, dx, dy) < source_gray.at(static_cast<int>(u), y);
            cost += bt != bs ? 1 : 0;
        }
    return cost;
}

}  // namespace mbstereo::reference

#endif
