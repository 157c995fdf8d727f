#ifndef MBSTEREO_GEOMETRY_HPP
#define MBSTEREO_GEOMETRY_HPP

// Disparity-conditioned horizontal warping.
//
// Convention: a left-view pixel x with disparity d >= 0 appears in a source view with
// scale s at abscissa x - s*d. The right view has s = 1, so x_right = x_left - d.

#include "core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mbstereo {

/// Scale factors of the canonical five-camera rig, relative to the left/right baseline.
inline constexpr double kScaleLeft = 0.0;
inline constexpr double kScaleRight = 1.0;
inline constexpr double kScaleLeftLeft = -1.0;
inline constexpr double kScaleRightRight = 2.0;
inline constexpr double kScaleCenter = 0.5;

/// Scale of a canonical view label (l, r, ll, rr, c), or nullopt for other labels.
inline std::optional<double> canonical_scale(std::string_view label) {
    if (label == "l") return kScaleLeft;
    if (label == "r") return kScaleRight;
    if (label == "ll") return kScaleLeftLeft;
    if (label == "rr") return kScaleRightRight;
    if (label == "c") return kScaleCenter;
    return std::nullopt;
}

struct SourceView {
    std::string name;
    Image image;
    double scale = 1.0;
};

/// Left (target) view plus source views, each with its disparity scale factor.
struct ViewSet {
    Image target;
    std::vector<SourceView> sources;

    /// Throws unless every image matches the target shape and every scale is finite.
    void validate() const {
        require(target.width > 0 && target.height > 0, "ViewSet: empty target");
        for (const auto& s : sources) {
            if (!s.image.same_shape(target)) throw InvalidArgument("ViewSet: source '" + s.name + "' shape differs from target");
            if (!std::isfinite(s.scale)) throw InvalidArgument("ViewSet: source '" + s.name + "' has non-finite scale");
        }
    }

    const SourceView* find(std::string_view name) const {
        for (const auto& s : sources)
            if (s.name == name) return &s;
        return nullptr;
    }
};

/// Reconstruction of the left view. Invalid pixels hold 0 in every channel.
struct WarpResult {
    Image image;
    Mask valid;
};

/// True iff the sampling abscissa x - scale*d lands inside [0, width-1].
inline bool sample_in_frame(double abscissa, int width) { return abscissa >= 0.0 && abscissa <= width - 1; }

/// Samples `source` at (x - scale*D(x,y), y) with horizontal linear interpolation.
/// Pixels whose abscissa leaves the frame, or whose disparity is invalid, are invalid.
inline WarpResult warp_to_left(const Image& source, const DisparityMap& disparity, double scale) {
    require_same_shape(source, disparity, "warp_to_left");
    require(std::isfinite(scale), "warp_to_left: non-finite scale");
    WarpResult out{Image(source.width, source.height, source.channels), Mask(source.width, source.height, 0)};
    const int w = source.width;
    for (int y = 0; y < source.height; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!disparity.is_valid(x, y)) continue;
            const double u = x - scale * static_cast<double>(disparity.value(x, y));
            if (!sample_in_frame(u, w)) continue;
            const int x0 = std::min(static_cast<int>(std::floor(u)), w - 1);
            const int x1 = std::min(x0 + 1, w - 1);
            const double f = u - x0;
            for (int c = 0; c < source.channels; ++c) {
                const double a = source.at(x0, y, c);
                const double b = source.at(x1, y, c);
                out.image.at(x, y, c) = f == 0.0 ? static_cast<float>(a) : static_cast<float>(a + f * (b - a));
            }
            out.valid(x, y) = 1;
        }
    }
    return out;
}

/// Disparity scale of a view synthesized after upscaling the input by `rescale_factor`:
/// horizontal shift is inversely proportional to the rescale factor.
inline double effective_scale(double base_scale, double rescale_factor) {
    if (!(rescale_factor > 0.0) || !std::isfinite(rescale_factor))
        throw InvalidArgument("effective_scale: rescale factor must be positive and finite");
    return base_scale / rescale_factor;
}

/// Uniformly multiplies every valid disparity.
inline DisparityMap scale_disparity(const DisparityMap& d, double factor) {
    DisparityMap out = d;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (out.valid[i]) out.values[i] = static_cast<float>(out.values[i] * factor);
    return out;
}

}  // namespace mbstereo

#endif
