#include "test_support.hpp"

#include <cmath>
#include <limits>

using namespace mbstereo;

namespace {

double epe_on(const DisparityMap& pred, const DisparityMap& gt, const Mask& sel) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < gt.values.size(); ++i)
        if (sel.data[i] && gt.valid[i] && pred.valid[i]) {
            s += std::abs(static_cast<double>(pred.values[i]) - gt.values[i]);
            ++n;
        }
    return n == 0 ? 0.0 : s / static_cast<double>(n);
}

CostVolume volume_1d(const std::vector<std::vector<float>>& per_pixel) {
    CostVolume v(static_cast<int>(per_pixel.size()), 1, static_cast<int>(per_pixel.front().size()), 0.0f);
    for (int x = 0; x < v.width; ++x)
        for (int d = 0; d < v.d_max; ++d) {
            v.set(x, 0, d, per_pixel[x][d]);
            v.max_cost = std::max(v.max_cost, per_pixel[x][d]);
        }
    return v;
}

/// Pixels whose (2 margin + 1)^2 neighbourhood has a single ground-truth disparity.
Mask away_from_edges(const DisparityMap& gt, int margin) {
    Mask m(gt.width, gt.height, 0);
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x) {
            bool flat = true;
            for (int yy = std::max(0, y - margin); yy <= std::min(gt.height - 1, y + margin) && flat; ++yy)
                for (int xx = std::max(0, x - margin); xx <= std::min(gt.width - 1, x + margin) && flat; ++xx)
                    flat = gt.value(xx, yy) == gt.value(x, y);
            m(x, y) = flat;
        }
    return m;
}

Mask intersect(Mask a, const Mask& b) {
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] = a.data[i] && b.data[i];
    return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Photometric matcher

TEST(PhotometricMatch, ExactOnLayerFreeSceneWithRightView) {
    SceneSpec spec = testutil::one_layer_spec();
    spec.layers.clear();
    spec.background_disparity = 4.0;
    const auto scene = generate_scene(spec);
    const DisparityMap d = photometric_match(scene.view_set({"r"}), 10);
    // Columns whose aggregation windows see only in-frame samples of the true shift.
    for (int y = 0; y < spec.height; ++y)
        for (int x = 12; x < spec.width; ++x) {
            ASSERT_TRUE(d.is_valid(x, y));
            EXPECT_EQ(d.value(x, y), 4.0f) << x << "," << y;
        }
}

TEST(PhotometricMatch, ExactAwayFromDepthEdgesOnCovisiblePixels) {
    const auto scene = generate_scene(make_suite_spec(0));
    const DisparityMap d = photometric_match(scene.view_set({"r"}), 32);
    // Layer edges pull the aggregation windows of nearby pixels; stay clear of them in both directions.
    const Mask sel = intersect(analytic_covisibility(scene, "r"), away_from_edges(scene.gt_disparity_left, 24));
    ASSERT_GT(testutil::count(sel), 1000u);
    EXPECT_EQ(epe_on(d, scene.gt_disparity_left, sel), 0.0);
}

TEST(PhotometricMatch, LeftLeftViewRecoversRightOcclusionBand) {
    const auto scene = generate_scene(testutil::one_layer_spec(8.0, 0.0));
    const Mask& occ = scene.analytic_masks.at("r").occ;
    const DisparityMap only_r = photometric_match(scene.view_set({"r"}), 12);
    const DisparityMap r_ll = photometric_match(scene.view_set({"r", "ll"}), 12);
    const double band_r = epe_on(only_r, scene.gt_disparity_left, occ);
    const double band_rll = epe_on(r_ll, scene.gt_disparity_left, occ);
    EXPECT_GT(band_r, 1.0);
    EXPECT_LT(band_rll, 0.5 * band_r);
}

TEST(PhotometricMatch, MatchesNaiveReference) {
    for (std::uint64_t k = 0; k < 4; ++k) {
        const auto scene = generate_scene(make_suite_spec(500 + k, 32, 32, k % 2 == 1));
        const ViewSet views = scene.view_set({"r", "ll", "c"});
        EXPECT_EQ(photometric_match(views, 12), reference::photometric_match(views, 12)) << k;
    }
}

TEST(PhotometricMatch, Errors) {
    const ViewSet empty{Image(4, 4, 1), {}};
    EXPECT_THROW(photometric_match(empty, 4), InvalidArgument);
    const ViewSet one{Image(4, 4, 1), {{"r", Image(4, 4, 1), 1.0}}};
    EXPECT_THROW(photometric_match(one, 0), InvalidArgument);
    EXPECT_THROW(photometric_match(one, 2, 0.85, 4), InvalidArgument);
}

TEST(PhotometricCost, ArgminAgreesWithPhotometricMatch) {
    const auto scene = generate_scene(make_suite_spec(4, 64, 48));
    const ViewSet views = scene.view_set();
    const CostVolume vol = photometric_cost(views, 16);
    const DisparityMap direct = photometric_match(views, 16);
    std::size_t disagree = 0;
    for (int y = 0; y < vol.height; ++y)
        for (int x = 0; x < vol.width; ++x) {
            int best = -1;
            for (int d = 0; d < vol.d_max; ++d)
                if (vol.is_valid(x, y, d) && (best < 0 || vol.cost(x, y, d) < vol.cost(x, y, best))) best = d;
            ASSERT_EQ(best >= 0, direct.is_valid(x, y));
            // Single-precision storage may reorder near-ties only.
            if (best >= 0 && best != static_cast<int>(direct.value(x, y))) ++disagree;
        }
    EXPECT_LE(disagree, vol.width * vol.height / 1000u);
}

// ---------------------------------------------------------------------------
// Census cost

TEST(CensusCost, IdenticalImagesAtZeroDisparity) {
    const Image img = testutil::noise_image(1, 20, 12, 1);
    for (double scale : {1.0, -1.0, 0.5, 2.0}) {
        const CostVolume v = census_cost(img, img, scale, 3);
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 20; ++x) EXPECT_EQ(v.cost(x, y, 0), 0.0f);
    }
}

TEST(CensusCost, ConstantImagesCostNothing) {
    const CostVolume v = census_cost(Image(10, 6, 1, 0.3f), Image(10, 6, 1, 0.7f), 1.0, 4);
    for (std::size_t i = 0; i < v.costs.size(); ++i)
        if (v.valid[i]) EXPECT_EQ(v.costs[i], 0.0f);
}

TEST(CensusCost, OutOfFrameIsInvalidAtMaxCost) {
    const CostVolume v = census_cost(testutil::noise_image(2, 8, 4), testutil::noise_image(3, 8, 4), 1.0, 4);
    EXPECT_EQ(v.max_cost, 24.0f);
    EXPECT_FALSE(v.is_valid(2, 0, 3));
    EXPECT_EQ(v.cost(2, 0, 3), 24.0f);
    EXPECT_TRUE(v.is_valid(3, 0, 3));
}

TEST(CensusCost, MatchesBruteForceSignatureComparison) {
    const Image a = testutil::noise_image(4, 16, 16), b = testutil::noise_image(5, 16, 16);
    for (int window : {3, 5, 7})
        for (double scale : {1.0, -1.0, 0.5}) {
            const CostVolume v = census_cost(a, b, scale, 6, window);
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x)
                    for (int d = 0; d < 6; ++d) {
                        const int ref = reference::census_cost_at(a, b, scale, d, window, x, y);
                        ASSERT_EQ(v.is_valid(x, y, d), ref >= 0);
                        if (ref >= 0) ASSERT_EQ(v.cost(x, y, d), static_cast<float>(ref)) << x << "," << y << "," << d;
                    }
        }
}

TEST(CensusCost, Errors) {
    EXPECT_THROW(census_cost(Image(4, 4, 1), Image(4, 4, 1), 1.0, 0), InvalidArgument);
    EXPECT_THROW(census_cost(Image(4, 4, 1), Image(4, 4, 1), 1.0, 2, 9), InvalidArgument);
    EXPECT_THROW(census_cost(Image(4, 4, 1), Image(5, 4, 1), 1.0, 2), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Fusion

TEST(FuseMultibaseline, SingleVolumeIsIdentity) {
    const CostVolume v = census_cost(testutil::noise_image(6, 12, 6), testutil::noise_image(7, 12, 6), 1.0, 5);
    EXPECT_EQ(fuse_multibaseline({v}), v);
}

TEST(FuseMultibaseline, InvalidEntriesAreIgnored) {
    CostVolume a(2, 1, 2, 9.0f), b(2, 1, 2, 5.0f);
    b.set(0, 0, 0, 3.0f);
    b.set(1, 0, 1, 4.0f);
    a.set(1, 0, 1, 1.0f);
    const CostVolume f = fuse_multibaseline({a, b});
    EXPECT_EQ(f.cost(0, 0, 0), 3.0f);
    EXPECT_EQ(f.cost(1, 0, 1), 1.0f);
    EXPECT_FALSE(f.is_valid(0, 0, 1));
    EXPECT_EQ(f.cost(0, 0, 1), 9.0f);
    EXPECT_EQ(f.max_cost, 9.0f);
}

TEST(FuseMultibaseline, OccludedPixelTakesLeftLeftCost) {
    const auto scene = generate_scene(testutil::one_layer_spec(8.0, 0.0));
    const CostVolume r = census_cost(scene.image("l"), scene.image("r"), 1.0, 12);
    const CostVolume ll = census_cost(scene.image("l"), scene.image("ll"), -1.0, 12);
    const CostVolume f = fuse_multibaseline({r, ll});
    const Mask& occ = scene.analytic_masks.at("r").occ;
    std::size_t checked = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x)
            if (occ(x, y)) {
                const int d = static_cast<int>(scene.gt_disparity_left.value(x, y));
                EXPECT_EQ(f.cost(x, y, d), std::min(r.cost(x, y, d), ll.cost(x, y, d)));
                // Where the 5x5 census window stays on the background (left of column 22), ll matches exactly.
                if (x < 22) {
                    EXPECT_EQ(ll.cost(x, y, d), 0.0f) << x << "," << y;
                    EXPECT_EQ(f.cost(x, y, d), ll.cost(x, y, d));
                    ++checked;
                }
            }
    EXPECT_GT(checked, 0u);
}

TEST(FuseMultibaseline, Errors) {
    EXPECT_THROW(fuse_multibaseline({}), InvalidArgument);
    EXPECT_THROW(fuse_multibaseline({CostVolume(2, 2, 2, 1.0f), CostVolume(2, 2, 3, 1.0f)}), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Aggregation

TEST(SgmAggregate, SinglePathMatchesScanlineDynamicProgram) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<float> u(0.0f, 20.0f);
    std::vector<std::vector<float>> c(30, std::vector<float>(7));
    for (auto& row : c)
        for (auto& v : row) v = std::round(u(gen));
    const CostVolume vol = volume_1d(c);
    const float p1 = 3.0f, p2 = 1e6f;
    const auto L = aggregate_path(vol, 1, 0, p1, p2);

    // Classic left-to-right DP with only 0 / ±1 transitions (P2 unreachable), normalized by the previous minimum.
    std::vector<double> prev(c[0].begin(), c[0].end());
    for (int d = 0; d < 7; ++d) EXPECT_EQ(L[vol.index(0, 0, d)], c[0][d]);
    for (std::size_t x = 1; x < c.size(); ++x) {
        const double mn = *std::min_element(prev.begin(), prev.end());
        std::vector<double> cur(7);
        for (int d = 0; d < 7; ++d) {
            double best = prev[d];
            if (d > 0) best = std::min(best, prev[d - 1] + p1);
            if (d < 6) best = std::min(best, prev[d + 1] + p1);
            cur[d] = c[x][d] + best - mn;
            EXPECT_EQ(L[vol.index(static_cast<int>(x), 0, d)], static_cast<float>(cur[d])) << x << "," << d;
        }
        prev = cur;
    }
}

TEST(SgmAggregate, ZeroVolumeStaysZero) {
    CostVolume v(6, 5, 4, 0.0f);
    for (std::size_t i = 0; i < v.valid.size(); ++i) v.valid[i] = 1;
    const CostVolume a = sgm_aggregate(v, SgmParams{});
    for (float c : a.costs) EXPECT_EQ(c, 0.0f);
}

TEST(SgmAggregate, UniformVolumeResolvesToZeroDisparity) {
    CostVolume v(6, 5, 4, 7.0f);
    for (std::size_t i = 0; i < v.valid.size(); ++i) v.valid[i] = 1;
    const DisparityMap d = wta_subpixel(sgm_aggregate(v, SgmParams{}));
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        EXPECT_TRUE(d.valid[i]);
        EXPECT_EQ(d.values[i], 0.0f);
    }
}

TEST(SgmAggregate, ZeroPenaltiesSumRawCostPerPath) {
    const CostVolume v = census_cost(testutil::noise_image(8, 14, 9), testutil::noise_image(9, 14, 9), 1.0, 5);
    for (int paths : {4, 8}) {
        SgmParams p;
        p.p1 = p.p2 = 0.0f;
        p.paths = paths;
        const CostVolume a = sgm_aggregate(v, p);
        for (std::size_t i = 0; i < v.costs.size(); ++i)
            if (v.valid[i]) EXPECT_EQ(a.costs[i], static_cast<float>(paths) * v.costs[i]);
    }
}

TEST(SgmAggregate, RejectsBadParams) {
    SgmParams p;
    p.paths = 3;
    EXPECT_THROW(sgm_aggregate(CostVolume(2, 2, 2, 0.0f), p), InvalidArgument);
    p = SgmParams{};
    p.p1 = 5.0f;
    p.p2 = 1.0f;
    EXPECT_THROW(sgm_aggregate(CostVolume(2, 2, 2, 0.0f), p), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Winner-take-all

TEST(WtaSubpixel, SymmetricParabola) {
    const DisparityMap d = wta_subpixel(volume_1d({{3.0f, 1.0f, 3.0f}}));
    EXPECT_EQ(d.value(0, 0), 1.0f);
}

TEST(WtaSubpixel, AsymmetricParabola) {
    const DisparityMap d = wta_subpixel(volume_1d({{4.0f, 1.0f, 2.0f}}));
    EXPECT_EQ(d.value(0, 0), 1.25f);
}

TEST(WtaSubpixel, BoundaryCandidatesAreUnrefinedAndTiesGoLow) {
    const DisparityMap d = wta_subpixel(volume_1d({{1.0f, 2.0f, 5.0f}, {2.0f, 2.0f, 2.0f}, {5.0f, 3.0f, 0.0f}}));
    EXPECT_EQ(d.value(0, 0), 0.0f);
    EXPECT_EQ(d.value(1, 0), 0.0f);
    EXPECT_EQ(d.value(2, 0), 2.0f);
}

TEST(WtaSubpixel, OffsetIsClamped) {
    EXPECT_EQ(parabolic_offset(100.0, 0.0, 0.0), 0.5);
    EXPECT_EQ(parabolic_offset(0.0, 0.0, 100.0), -0.5);
    EXPECT_EQ(parabolic_offset(1.0, 1.0, 1.0), 0.0);
}

TEST(WtaSubpixel, FractionalScenesReachSubpixelAccuracy) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto scene = generate_scene(make_suite_spec(seed, 256, 128, true));
        const ViewSet views = scene.view_set();
        const DisparityMap d = wta_subpixel(photometric_cost(views, 32));
        Mask cov(scene.spec.width, scene.spec.height, 0);
        for (const char* label : kSourceLabels) {
            const Mask c = analytic_covisibility(scene, label);
            for (std::size_t i = 0; i < cov.data.size(); ++i) cov.data[i] |= c.data[i];
        }
        EXPECT_LT(epe_on(d, scene.gt_disparity_left, cov), 0.25) << seed;
    }
}

// ---------------------------------------------------------------------------
// Full SGM

TEST(SgmMatch, NonOccludedEpeBelowOnePixel) {
    const auto scene = generate_scene(make_suite_spec(1));
    const DisparityMap d = sgm_match(scene.view_set({"r"}), 48);
    const Mask noc = scene.analytic_masks.at("r").noc();
    EXPECT_LT(epe_on(d, scene.gt_disparity_left, noc), 1.0);
}

TEST(SgmMatch, SingleCandidateGivesZero) {
    const auto scene = generate_scene(make_suite_spec(2, 64, 32));
    SgmParams p;
    p.lr_check = false;
    const DisparityMap d = sgm_match(scene.view_set(), 1, p);
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        EXPECT_TRUE(d.valid[i]);
        EXPECT_EQ(d.values[i], 0.0f);
    }
}

TEST(SgmMatch, Deterministic) {
    const auto scene = generate_scene(make_suite_spec(3, 128, 64));
    const ViewSet views = scene.view_set({"r", "ll", "rr"});
    EXPECT_EQ(sgm_match(views, 32), sgm_match(views, 32));
}

TEST(SgmMatch, LrCheckOnlyRemovesPixels) {
    const auto scene = generate_scene(make_suite_spec(5, 128, 64));
    SgmParams off;
    off.lr_check = false;
    const DisparityMap raw = sgm_match(scene.view_set({"r"}), 32, off);
    const DisparityMap checked = sgm_match(scene.view_set({"r"}), 32);
    std::size_t removed = 0;
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        if (checked.valid[i]) EXPECT_EQ(checked.values[i], raw.values[i]);
        removed += raw.valid[i] && !checked.valid[i];
    }
    EXPECT_GT(removed, 0u);
}

TEST(SgmParams, Validation) {
    SgmParams p;
    EXPECT_NO_THROW(p.validate());
    p.census_window = 4;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = SgmParams{};
    p.p1 = 0.0f;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = SgmParams{};
    p.lr_threshold = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
}
