#include "test_support.hpp"

using namespace mbstereo;

namespace {

Image ramp(int w, int h) {
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<float>(x) / static_cast<float>(w);
    return img;
}

}  // namespace

TEST(CanonicalScale, FiveViewRig) {
    EXPECT_EQ(canonical_scale("r"), 1.0);
    EXPECT_EQ(canonical_scale("ll"), -1.0);
    EXPECT_EQ(canonical_scale("rr"), 2.0);
    EXPECT_EQ(canonical_scale("c"), 0.5);
    EXPECT_EQ(canonical_scale("l"), 0.0);
    EXPECT_FALSE(canonical_scale("x").has_value());
}

TEST(WarpToLeft, ZeroScaleOrZeroDisparityIsIdentity) {
    const Image src = testutil::noise_image(1, 12, 5, 3);
    const DisparityMap zero(12, 5, 0.0f);
    DisparityMap some(12, 5, 3.0f);
    for (const auto& [d, s] : {std::pair{zero, 1.0}, std::pair{some, 0.0}}) {
        const auto r = warp_to_left(src, d, s);
        EXPECT_EQ(r.image, src);
        EXPECT_EQ(testutil::count(r.valid), r.valid.size());
    }
}

TEST(WarpToLeft, ConstantShiftOnRamp) {
    const Image src = ramp(10, 2);
    const auto r = warp_to_left(src, DisparityMap(10, 2, 2.0f), 1.0);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 10; ++x) {
            if (x < 2) {
                EXPECT_FALSE(r.valid(x, y));
                EXPECT_EQ(r.image.at(x, y), 0.0f);
            } else {
                EXPECT_TRUE(r.valid(x, y));
                EXPECT_EQ(r.image.at(x, y), src.at(x - 2, y));
            }
        }
}

TEST(WarpToLeft, NegativeScaleShiftsTheOtherWay) {
    const Image src = ramp(10, 1);
    const auto r = warp_to_left(src, DisparityMap(10, 1, 3.0f), -1.0);
    EXPECT_EQ(r.image.at(0, 0), src.at(3, 0));
    EXPECT_FALSE(r.valid(7, 0));
    EXPECT_TRUE(r.valid(6, 0));
}

TEST(WarpToLeft, FractionalSampleInterpolatesLinearly) {
    const Image src = ramp(10, 1);
    const auto r = warp_to_left(src, DisparityMap(10, 1, 1.25f), 1.0);
    EXPECT_FLOAT_EQ(r.image.at(5, 0), 3.75f / 10.0f);
    EXPECT_FALSE(r.valid(1, 0));  // abscissa -0.25
}

TEST(WarpToLeft, LastColumnIsInFrame) {
    const Image src = ramp(6, 1);
    const auto r = warp_to_left(src, DisparityMap(6, 1, 0.0f), 1.0);
    EXPECT_TRUE(r.valid(5, 0));
    // x = 0 with scale -1 and d = 5 samples exactly the last column.
    DisparityMap d(6, 1, 0.0f);
    d.set(0, 0, 5.0f);
    const auto r2 = warp_to_left(src, d, -1.0);
    EXPECT_TRUE(r2.valid(0, 0));
    EXPECT_EQ(r2.image.at(0, 0), src.at(5, 0));
}

TEST(WarpToLeft, InvalidDisparityInvalidatesPixel) {
    DisparityMap d(4, 1, 0.0f);
    d.invalidate(2, 0);
    const auto r = warp_to_left(ramp(4, 1), d, 1.0);
    EXPECT_FALSE(r.valid(2, 0));
    EXPECT_EQ(r.image.at(2, 0), 0.0f);
}

TEST(WarpToLeft, DimensionMismatchThrows) {
    EXPECT_THROW(warp_to_left(Image(4, 4, 1), DisparityMap(4, 3), 1.0), InvalidArgument);
}

TEST(WarpToLeft, SyntheticViewsAlignWithLeft) {
    for (bool fractional : {false, true}) {
        const auto scene = generate_scene(make_suite_spec(2, 256, 128, fractional));
        for (const char* label : kSourceLabels) {
            const Mask cov = analytic_covisibility(scene, label);
            const auto w = warp_to_left(scene.image(label), scene.gt_disparity_left, *canonical_scale(label));
            const double err = validate_detail::mean_abs_on(w.image, scene.image("l"), cov);
            EXPECT_LE(err, 0.02) << label << (fractional ? " fractional" : " integer");
            if (!fractional) EXPECT_EQ(err, 0.0) << label;
        }
    }
}

TEST(EffectiveScale, InverseRelation) {
    EXPECT_EQ(effective_scale(1.0, 2.0), 0.5);
    EXPECT_EQ(effective_scale(1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(effective_scale(1.0, 1.5), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(effective_scale(1.0, 3.0), 1.0 / 3.0);
    EXPECT_THROW(effective_scale(1.0, 0.0), InvalidArgument);
    EXPECT_THROW(effective_scale(1.0, -2.0), InvalidArgument);
}

TEST(WarpToLeft, CompositionWithRescaledDisparity) {
    const auto scene = generate_scene(make_suite_spec(4));
    for (const char* label : kSourceLabels) {
        const double s = *canonical_scale(label);
        const auto a = warp_to_left(scene.image(label), scene.gt_disparity_left, s);
        const auto b = warp_to_left(scene.image(label), scale_disparity(scene.gt_disparity_left, 2.0), effective_scale(s, 2.0));
        std::size_t n = 0;
        EXPECT_TRUE(validate_detail::equal_where(a.image, a.valid, b.image, b.valid, &n)) << label;
        EXPECT_GT(n, 0u);
    }
}

TEST(ViewSet, ValidateRejectsShapeAndScale) {
    ViewSet vs{Image(4, 4, 1), {{"r", Image(4, 3, 1), 1.0}}};
    EXPECT_THROW(vs.validate(), InvalidArgument);
    vs.sources[0].image = Image(4, 4, 1);
    vs.sources[0].scale = std::numeric_limits<double>::infinity();
    EXPECT_THROW(vs.validate(), InvalidArgument);
    vs.sources[0].scale = 1.0 / 3.0;  // arbitrary fractional baselines are fine
    EXPECT_NO_THROW(vs.validate());
    EXPECT_NE(vs.find("r"), nullptr);
    EXPECT_EQ(vs.find("ll"), nullptr);
}
