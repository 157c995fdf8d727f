#ifndef MBSTEREO_MATCHER_HPP
#define MBSTEREO_MATCHER_HPP

// Disparity estimation over a ViewSet.
//
//  * photometric_match: exhaustive integer search minimizing the window-aggregated
//    per-pixel minimum warping loss (photometric_cost exposes the same loss as a volume).
//  * sgm_match: census cost per source view, per-entry minimum fusion across views,
//    semi-global aggregation, winner-take-all with parabolic refinement and a
//    left-right consistency check against every source view.

#include "core.hpp"
#include "geometry.hpp"
#include "masks.hpp"
#include "photometric.hpp"

#include <array>
#include <bit>
#include <limits>
#include <vector>

namespace mbstereo {

/// Matching cost per (pixel, integer candidate). Entries whose source sample falls outside
/// the frame are flagged invalid and hold max_cost.
struct CostVolume {
    int width = 0;
    int height = 0;
    int d_max = 0;
    float max_cost = 0.0f;
    std::vector<float> costs;
    std::vector<std::uint8_t> valid;

    CostVolume() = default;
    CostVolume(int w, int h, int d, float max_c)
        : width(w), height(h), d_max(d), max_cost(max_c),
          costs(static_cast<std::size_t>(w) * h * d, max_c), valid(static_cast<std::size_t>(w) * h * d, 0) {}

    std::size_t index(int x, int y, int d) const { return (static_cast<std::size_t>(y) * width + x) * d_max + d; }
    float cost(int x, int y, int d) const { return costs[index(x, y, d)]; }
    bool is_valid(int x, int y, int d) const { return valid[index(x, y, d)] != 0; }
    void set(int x, int y, int d, float c) {
        costs[index(x, y, d)] = c;
        valid[index(x, y, d)] = 1;
    }
    bool same_layout(const CostVolume& o) const { return width == o.width && height == o.height && d_max == o.d_max; }

    friend bool operator==(const CostVolume&, const CostVolume&) = default;
};

struct SgmParams {
    int census_window = 5;
    float p1 = 10.0f;
    float p2 = 120.0f;
    int paths = 8;
    double lr_threshold = 1.0;
    bool lr_check = true;

    void validate() const {
        require(census_window >= 3 && census_window % 2 == 1, "SgmParams: census window must be odd and >= 3");
        require(census_window <= 7, "SgmParams: census window above 7 does not fit a 64-bit signature");
        require(p1 > 0.0f && p1 < p2, "SgmParams: need 0 < p1 < p2");
        require(paths == 4 || paths == 8, "SgmParams: paths must be 4 or 8");
        require(lr_threshold > 0.0, "SgmParams: lr_threshold must be positive");
    }
};

// ---------------------------------------------------------------------------
// Photometric matcher

namespace matcher_detail {

/// Mean of valid entries in the (window x window) neighbourhood clipped to the frame; the centre must be valid.
inline void aggregate_window(const Grid<double>& loss, const Mask& valid, int window, Grid<double>& out, Mask& out_valid) {
    const int r = window / 2;
    const int w = loss.width, h = loss.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!valid(x, y)) {
                out_valid(x, y) = 0;
                continue;
            }
            double sum = 0.0;
            int n = 0;
            for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx)
                    if (valid(xx, yy)) {
                        sum += loss(xx, yy);
                        ++n;
                    }
            out(x, y) = sum / n;
            out_valid(x, y) = 1;
        }
}

/// Calls fn(d, aggregated, aggregated_valid) for each integer candidate d in [0, d_max), where the
/// slice is the window-aggregated minimum-over-views photometric loss under the constant disparity d.
template <class Fn>
void for_each_photometric_slice(const ViewSet& views, int d_max, double alpha, int window, Fn&& fn) {
    if (views.sources.empty()) throw InvalidArgument("photometric matching: empty views");
    require(d_max >= 1, "photometric matching: d_max must be >= 1");
    require(window >= 1 && window % 2 == 1, "photometric matching: window must be odd");
    require_alpha(alpha);
    views.validate();
    const int w = views.target.width, h = views.target.height;
    Grid<double> agg(w, h, 0.0);
    Mask agg_valid(w, h, 0);
    for (int d = 0; d < d_max; ++d) {
        const DisparityMap constant(w, h, static_cast<float>(d));
        std::vector<std::string> labels(views.sources.size());
        const LossMap m = min_over_views(per_view_losses(views, constant, alpha), std::move(labels), w, h);
        aggregate_window(m.values, m.valid, window, agg, agg_valid);
        fn(d, agg, agg_valid);
    }
}

}  // namespace matcher_detail

/// For each integer d in [0, d_max), evaluates the window-aggregated minimum-over-views photometric
/// loss under the constant disparity d and keeps the argmin (ties toward smaller d). Pixels with no
/// valid view at any candidate are invalid.
inline DisparityMap photometric_match(const ViewSet& views, int d_max, double alpha = kDefaultAlpha, int window = 5) {
    const int w = views.target.width, h = views.target.height;
    Grid<double> best(w, h, std::numeric_limits<double>::infinity());
    Grid<int> best_d(w, h, -1);
    matcher_detail::for_each_photometric_slice(views, d_max, alpha, window,
                                               [&](int d, const Grid<double>& agg, const Mask& agg_valid) {
                                                   for (std::size_t i = 0; i < agg.size(); ++i)
                                                       if (agg_valid.data[i] && agg.data[i] < best.data[i]) {
                                                           best.data[i] = agg.data[i];
                                                           best_d.data[i] = d;
                                                       }
                                               });
    DisparityMap out(w, h, 0.0f, false);
    for (std::size_t i = 0; i < best_d.size(); ++i)
        if (best_d.data[i] >= 0) {
            out.values[i] = static_cast<float>(best_d.data[i]);
            out.valid[i] = 1;
        }
    return out;
}

/// The same aggregated photometric loss as a cost volume (single precision), so it can feed
/// wta_subpixel or sgm_aggregate. Invalid entries hold the largest valid cost.
inline CostVolume photometric_cost(const ViewSet& views, int d_max, double alpha = kDefaultAlpha, int window = 5) {
    CostVolume vol(views.target.width, views.target.height, std::max(d_max, 1), 0.0f);
    matcher_detail::for_each_photometric_slice(views, d_max, alpha, window,
                                               [&](int d, const Grid<double>& agg, const Mask& agg_valid) {
                                                   for (int y = 0; y < agg.height; ++y)
                                                       for (int x = 0; x < agg.width; ++x)
                                                           if (agg_valid(x, y)) vol.set(x, y, d, static_cast<float>(agg(x, y)));
                                               });
    for (std::size_t i = 0; i < vol.costs.size(); ++i)
        if (vol.valid[i]) vol.max_cost = std::max(vol.max_cost, vol.costs[i]);
    for (std::size_t i = 0; i < vol.costs.size(); ++i)
        if (!vol.valid[i]) vol.costs[i] = vol.max_cost;
    return vol;
}

// ---------------------------------------------------------------------------
// Census cost

/// Census signature: one bit per window neighbour (row-major, centre skipped), set when the
/// neighbour is darker than the centre. Out-of-frame neighbours replicate the nearest edge pixel.
inline Grid<std::uint64_t> census_transform(const Image& img, int window) {
    require(window >= 3 && window % 2 == 1 && window <= 7, "census_transform: window must be odd in [3,7]");
    const Image g = to_gray(img);
    const int r = window / 2;
    Grid<std::uint64_t> out(g.width, g.height, 0);
    parallel_for(g.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < g.width; ++x) {
                const float c = g.at(x, y);
                std::uint64_t sig = 0;
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int xx = std::clamp(x + dx, 0, g.width - 1);
                        const int yy = std::clamp(y + dy, 0, g.height - 1);
                        sig = (sig << 1) | (g.at(xx, yy) < c ? 1u : 0u);
                    }
                out(x, y) = sig;
            }
    });
    return out;
}

/// Hamming distance between census signatures of target(x,y) and source(round(x - scale*d), y).
inline CostVolume census_cost(const Image& target, const Image& source, double scale, int d_max, int window = 5) {
    require(d_max >= 1, "census_cost: d_max must be >= 1");
    require(target.width == source.width && target.height == source.height, "census_cost: dimension mismatch");
    require(std::isfinite(scale), "census_cost: non-finite scale");
    const auto ct = census_transform(target, window);
    const auto cs = census_transform(source, window);
    const int w = target.width;
    CostVolume vol(w, target.height, d_max, static_cast<float>(window * window - 1));
    parallel_for(target.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < w; ++x)
                for (int d = 0; d < d_max; ++d) {
                    const long u = round_half_up(x - scale * d);
                    if (u < 0 || u >= w) continue;
                    vol.set(x, y, d, static_cast<float>(std::popcount(ct(x, y) ^ cs(static_cast<int>(u), y))));
                }
    });
    return vol;
}

/// Per-entry minimum over volumes, ignoring invalid entries; an entry is invalid only if it is
/// invalid in every volume.
inline CostVolume fuse_multibaseline(const std::vector<CostVolume>& volumes) {
    if (volumes.empty()) throw InvalidArgument("fuse_multibaseline: empty volume list");
    float max_cost = 0.0f;
    for (const auto& v : volumes) {
        if (!v.same_layout(volumes.front())) throw InvalidArgument("fuse_multibaseline: volume layout mismatch");
        max_cost = std::max(max_cost, v.max_cost);
    }
    const auto& f = volumes.front();
    CostVolume out(f.width, f.height, f.d_max, max_cost);
    for (const auto& v : volumes)
        for (std::size_t i = 0; i < out.costs.size(); ++i) {
            if (!v.valid[i]) continue;
            if (!out.valid[i] || v.costs[i] < out.costs[i]) {
                out.costs[i] = v.costs[i];
                out.valid[i] = 1;
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Semi-global aggregation

/// Path directions in summation order; the first four are used for 4-path aggregation.
inline constexpr std::array<std::array<int, 2>, 8> kSgmDirections = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1},
}};

/// One path of the SGM recurrence
///   L(p,d) = C(p,d) + min(L(p-r,d), L(p-r,d-1)+P1, L(p-r,d+1)+P1, min_k L(p-r,k)+P2) - min_k L(p-r,k),
/// with L = C where p-r leaves the frame. Invalid entries contribute their max_cost.
inline std::vector<float> aggregate_path(const CostVolume& vol, int dx, int dy, float p1, float p2) {
    require(dx >= -1 && dx <= 1 && dy >= -1 && dy <= 1 && (dx != 0 || dy != 0), "aggregate_path: bad direction");
    const int w = vol.width, h = vol.height, nd = vol.d_max;
    std::vector<float> L(vol.costs.size());
    const int y_begin = dy >= 0 ? 0 : h - 1, y_end = dy >= 0 ? h : -1, y_step = dy >= 0 ? 1 : -1;
    const int x_begin = dx >= 0 ? 0 : w - 1, x_end = dx >= 0 ? w : -1, x_step = dx >= 0 ? 1 : -1;
    for (int y = y_begin; y != y_end; y += y_step)
        for (int x = x_begin; x != x_end; x += x_step) {
            const float* c = &vol.costs[vol.index(x, y, 0)];
            float* cur = &L[vol.index(x, y, 0)];
            const int px = x - dx, py = y - dy;
            if (px < 0 || px >= w || py < 0 || py >= h) {
                std::copy(c, c + nd, cur);
                continue;
            }
            const float* prev = &L[vol.index(px, py, 0)];
            const float prev_min = *std::min_element(prev, prev + nd);
            for (int d = 0; d < nd; ++d) {
                float m = prev[d];
                if (d > 0) m = std::min(m, prev[d - 1] + p1);
                if (d + 1 < nd) m = std::min(m, prev[d + 1] + p1);
                m = std::min(m, prev_min + p2);
                cur[d] = c[d] + m - prev_min;
            }
        }
    return L;
}

/// Sum of `paths` directional aggregations in fixed direction order. Validity is copied from the input;
/// invalid entries are reset to the largest aggregated cost, which becomes the new max_cost.
/// Accepts the degenerate 0 <= p1 <= p2 range so that the penalty-free case can be checked.
inline CostVolume sgm_aggregate(const CostVolume& vol, const SgmParams& params) {
    require(params.paths == 4 || params.paths == 8, "sgm_aggregate: paths must be 4 or 8");
    require(params.p1 >= 0.0f && params.p2 >= params.p1, "sgm_aggregate: need 0 <= p1 <= p2");
    CostVolume out = vol;
    std::fill(out.costs.begin(), out.costs.end(), 0.0f);
    for (int k = 0; k < params.paths; ++k) {
        const auto L = aggregate_path(vol, kSgmDirections[k][0], kSgmDirections[k][1], params.p1, params.p2);
        for (std::size_t i = 0; i < L.size(); ++i) out.costs[i] += L[i];
    }
    out.max_cost = out.costs.empty() ? 0.0f : *std::max_element(out.costs.begin(), out.costs.end());
    for (std::size_t i = 0; i < out.costs.size(); ++i)
        if (!out.valid[i]) out.costs[i] = out.max_cost;
    return out;
}

/// Parabola vertex offset through (-1,c0), (0,c1), (1,c2), clamped to [-0.5, 0.5]; 0 when not convex.
inline double parabolic_offset(double c0, double c1, double c2) {
    const double denom = c0 - 2.0 * c1 + c2;
    if (!(denom > 0.0)) return 0.0;
    return std::clamp((c0 - c2) / (2.0 * denom), -0.5, 0.5);
}

/// Winner-take-all over valid candidates (ties toward smaller d), refined by a parabola through the
/// neighbouring costs when both neighbours are valid candidates.
inline DisparityMap wta_subpixel(const CostVolume& vol) {
    require(vol.d_max >= 1, "wta_subpixel: d_max must be >= 1");
    DisparityMap out(vol.width, vol.height, 0.0f, false);
    for (int y = 0; y < vol.height; ++y)
        for (int x = 0; x < vol.width; ++x) {
            int best = -1;
            float best_cost = 0.0f;
            for (int d = 0; d < vol.d_max; ++d)
                if (vol.is_valid(x, y, d) && (best < 0 || vol.cost(x, y, d) < best_cost)) {
                    best = d;
                    best_cost = vol.cost(x, y, d);
                }
            if (best < 0) continue;
            double refined = best;
            if (best > 0 && best + 1 < vol.d_max && vol.is_valid(x, y, best - 1) && vol.is_valid(x, y, best + 1))
                refined += parabolic_offset(vol.cost(x, y, best - 1), best_cost, vol.cost(x, y, best + 1));
            out.set(x, y, static_cast<float>(refined));
        }
    return out;
}

/// Two-view SGM disparity of `target` against `source`, where the source abscissa is x - scale*d.
inline DisparityMap sgm_two_view(const Image& target, const Image& source, double scale, int d_max,
                                 const SgmParams& params) {
    return wta_subpixel(sgm_aggregate(census_cost(target, source, scale, d_max, params.census_window), params));
}

/// Full multi-baseline SGM: census per source, fuse, aggregate, WTA + parabola. With lr_check,
/// a pixel survives if it is consistent with the reverse disparity of at least one source view
/// (for a single right view this is the classic left-right check). Failed pixels become invalid.
inline DisparityMap sgm_match(const ViewSet& views, int d_max, const SgmParams& params = {}) {
    if (views.sources.empty()) throw InvalidArgument("sgm_match: empty views");
    require(d_max >= 1, "sgm_match: d_max must be >= 1");
    params.validate();
    views.validate();
    std::vector<CostVolume> volumes;
    volumes.reserve(views.sources.size());
    for (const auto& s : views.sources)
        volumes.push_back(census_cost(views.target, s.image, s.scale, d_max, params.census_window));
    DisparityMap left = wta_subpixel(sgm_aggregate(fuse_multibaseline(volumes), params));
    if (!params.lr_check) return left;

    Mask consistent(left.width, left.height, 0);
    for (const auto& s : views.sources) {
        // Seen from view s, the left image sits at scale -s.
        const DisparityMap reverse = sgm_two_view(s.image, views.target, -s.scale, d_max, params);
        const Mask occ = occlusion_mask(left, reverse, params.lr_threshold, s.scale);
        for (std::size_t i = 0; i < occ.data.size(); ++i)
            if (left.valid[i] && !occ.data[i]) consistent.data[i] = 1;
    }
    for (int y = 0; y < left.height; ++y)
        for (int x = 0; x < left.width; ++x)
            if (!consistent(x, y)) left.invalidate(x, y);
    return left;
}

}  // namespace mbstereo

#endif
