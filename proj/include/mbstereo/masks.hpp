#ifndef MBSTEREO_MASKS_HPP
#define MBSTEREO_MASKS_HPP

#include "core.hpp"
#include "geometry.hpp"

namespace mbstereo {

inline constexpr double kDefaultConsistencyThreshold = 1.0;

/// Region masks on the left view. occ and oof may overlap; noc is their common complement.
struct RegionMasks {
    Mask occ;
    Mask oof;

    Mask noc() const {
        Mask m(occ.width, occ.height, 0);
        for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = (!occ.data[i] && !oof.data[i]) ? 1 : 0;
        return m;
    }
};

/// Left-right consistency check against the disparity map of the view with the given scale:
///   D_delta(x,y) = |d_l(x,y) - d_v(round(x - scale*d_l(x,y)), y)|, occluded iff D_delta >= threshold.
/// Lookups that leave the frame, or land on an invalid d_v sample, count as occluded.
/// Pixels with invalid d_l are left unmarked.
inline Mask occlusion_mask(const DisparityMap& d_left, const DisparityMap& d_view,
                           double threshold = kDefaultConsistencyThreshold, double scale = 1.0) {
    require(d_left.width == d_view.width && d_left.height == d_view.height, "occlusion_mask: dimension mismatch");
    require(threshold > 0.0, "occlusion_mask: threshold must be positive");
    require(std::isfinite(scale), "occlusion_mask: non-finite scale");
    Mask m(d_left.width, d_left.height, 0);
    for (int y = 0; y < d_left.height; ++y)
        for (int x = 0; x < d_left.width; ++x) {
            if (!d_left.is_valid(x, y)) continue;
            const double dl = d_left.value(x, y);
            const long u = round_half_up(x - scale * dl);
            if (u < 0 || u >= d_left.width || !d_view.is_valid(static_cast<int>(u), y)) {
                m(x, y) = 1;
                continue;
            }
            const double delta = std::abs(dl - static_cast<double>(d_view.value(static_cast<int>(u), y)));
            m(x, y) = delta >= threshold ? 1 : 0;
        }
    return m;
}

/// Out-of-frame mask for the right view: D_shift(x,y) = x - d_l(x,y) < 0. Invalid pixels are unmarked.
inline Mask oof_mask(const DisparityMap& d_left) {
    Mask m(d_left.width, d_left.height, 0);
    for (int y = 0; y < d_left.height; ++y)
        for (int x = 0; x < d_left.width; ++x)
            if (d_left.is_valid(x, y) && static_cast<double>(x) - d_left.value(x, y) < 0.0) m(x, y) = 1;
    return m;
}

/// Evaluation masks for the left/right pair from both ground-truth disparity maps.
inline RegionMasks lr_region_masks(const DisparityMap& d_left, const DisparityMap& d_right,
                                   double threshold = kDefaultConsistencyThreshold) {
    return {occlusion_mask(d_left, d_right, threshold), oof_mask(d_left)};
}

}  // namespace mbstereo

#endif
