#include "test_support.hpp"

using namespace mbstereo;

TEST(GenerateScene, OneLayerBandsSitOnOppositeSides) {
    // Layer columns [24, 40) at d = 8 over a zero-disparity background.
    const auto scene = generate_scene(testutil::one_layer_spec(8.0, 0.0));
    const Mask& occ_r = scene.analytic_masks.at("r").occ;
    const Mask& occ_ll = scene.analytic_masks.at("ll").occ;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x) {
            const bool rows = y >= 8 && y < 24;
            EXPECT_EQ(occ_r(x, y), rows && x >= 16 && x < 24) << x << "," << y;
            EXPECT_EQ(occ_ll(x, y), rows && x >= 40 && x < 48) << x << "," << y;
        }
}

TEST(GenerateScene, GroundTruthDisparity) {
    const auto scene = generate_scene(testutil::one_layer_spec(6.0, 2.0));
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x) {
            const bool inside = x >= 24 && x < 40 && y >= 8 && y < 24;
            EXPECT_EQ(scene.gt_disparity_left.value(x, y), inside ? 6.0f : 2.0f);
            // The layer appears 6 px further left in the right view.
            const bool inside_r = x >= 18 && x < 34 && y >= 8 && y < 24;
            EXPECT_EQ(scene.gt_disparity_right.value(x, y), inside_r ? 6.0f : 2.0f);
        }
}

TEST(GenerateScene, LeftViewIsFullyCovisibleWithItself) {
    const auto scene = generate_scene(make_suite_spec(2));
    const Mask cov = analytic_covisibility(scene, "l");
    EXPECT_EQ(testutil::count(cov), cov.size());
}

TEST(GenerateScene, UnionOfSourceViewsCoversAlmostEverything) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto scene = generate_scene(make_suite_spec(seed));
        Mask any(scene.spec.width, scene.spec.height, 0);
        for (const char* label : kSourceLabels) {
            const Mask cov = analytic_covisibility(scene, label);
            for (std::size_t i = 0; i < any.data.size(); ++i) any.data[i] |= cov.data[i];
        }
        EXPECT_GE(static_cast<double>(testutil::count(any)) / any.size(), 0.99) << seed;
    }
}

TEST(GenerateScene, OcclusionBandsComplementOnIsolatedLayers) {
    const auto scene = generate_scene(testutil::one_layer_spec(10.0, 2.0));
    ASSERT_TRUE(layers_isolated(scene.spec));
    const Mask& occ_r = scene.analytic_masks.at("r").occ;
    const Mask cov_ll = analytic_covisibility(scene, "ll");
    for (std::size_t i = 0; i < occ_r.data.size(); ++i)
        if (occ_r.data[i]) EXPECT_TRUE(cov_ll.data[i]);
}

TEST(GenerateScene, Deterministic) {
    for (bool fractional : {false, true}) {
        const SceneSpec spec = make_suite_spec(21, 96, 48, fractional);
        const auto a = generate_scene(spec), b = generate_scene(spec);
        EXPECT_EQ(a.images, b.images);
        EXPECT_EQ(a.gt_disparity_left, b.gt_disparity_left);
        EXPECT_EQ(make_suite_spec(21, 96, 48, fractional), spec);
    }
    EXPECT_NE(generate_scene(make_suite_spec(1)).images.at("l"), generate_scene(make_suite_spec(2)).images.at("l"));
}

TEST(GenerateScene, SamplesStayInUnitRange) {
    const auto scene = generate_scene(make_suite_spec(3, 128, 64, true));
    for (const auto& [label, img] : scene.images)
        for (float v : img.data) {
            EXPECT_GE(v, 0.0f) << label;
            EXPECT_LE(v, 1.0f) << label;
        }
}

TEST(SuiteSpec, IntegerModeUsesEvenDisparities) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SceneSpec spec = make_suite_spec(seed);
        EXPECT_NO_THROW(spec.validate());
        EXPECT_EQ(std::fmod(spec.background_disparity, 2.0), 0.0);
        for (const auto& l : spec.layers) EXPECT_EQ(std::fmod(l.disparity, 2.0), 0.0);
    }
}

TEST(Manifest, RoundTripIsExact) {
    for (bool fractional : {false, true}) {
        const SceneSpec spec = make_suite_spec(8, 200, 100, fractional);
        EXPECT_EQ(parse_scene_manifest(scene_manifest(spec)), spec);
    }
}

TEST(Manifest, RejectsMalformedInput) {
    EXPECT_THROW(parse_scene_manifest("seed = 1\n"), InvalidArgument);
    std::string text = scene_manifest(testutil::one_layer_spec());
    text.replace(text.find("layer.0 = "), 10, "layer.0 = x ");
    EXPECT_THROW(parse_scene_manifest(text), InvalidArgument);
}

TEST(SceneSpec, ValidationErrors) {
    SceneSpec spec = testutil::one_layer_spec();
    spec.layers[0].disparity = 3.0;  // odd in integer mode
    EXPECT_THROW(spec.validate(), InvalidArgument);
    spec.fractional = true;
    EXPECT_NO_THROW(spec.validate());
    spec.layers[0].disparity = 0.0;  // behind the background
    EXPECT_THROW(spec.validate(), InvalidArgument);
    spec = testutil::one_layer_spec();
    spec.layers[0].x = 60;  // leaves the frame
    EXPECT_THROW(spec.validate(), InvalidArgument);
    spec = testutil::one_layer_spec();
    spec.texture_blur_passes = 0;
    EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(LayersIsolated, DetectsOverlappingReach) {
    SceneSpec spec = testutil::one_layer_spec();
    EXPECT_TRUE(layers_isolated(spec));
    spec.layers.push_back({44, 8, 10, 10, 4.0});  // reaches back to column 40
    EXPECT_FALSE(layers_isolated(spec));
    spec.layers.back().x = 52;
    EXPECT_TRUE(layers_isolated(spec));
    spec.layers.back() = {44, 26, 6, 4, 4.0};  // disjoint rows
    EXPECT_TRUE(layers_isolated(spec));
}
