#ifndef MBSTEREO_VALIDATE_HPP
#define MBSTEREO_VALIDATE_HPP

// Property suite over generated scenes: one named check per module invariant. Used by the
// `validate` command and by the test suite.

#include "core.hpp"
#include "geometry.hpp"
#include "imageio.hpp"
#include "masks.hpp"
#include "matcher.hpp"
#include "metrics.hpp"
#include "photometric.hpp"
#include "reference.hpp"
#include "synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace mbstereo {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    std::uint64_t seed = 0;     // first suite seed; suite scenes use seed .. seed + suite_scenes - 1
    int suite_scenes = 10;
    int oracle_scenes = 20;
    int monotonicity_trials = 100;
    std::filesystem::path work_dir;  // scratch space for I/O round trips; a temp dir when empty
};

namespace validate_detail {

/// Outcome of a single property: pass/fail plus a human-readable measurement.
struct Outcome {
    bool passed;
    std::string detail;
};

inline std::string fmt(double v) { return format_metric(v); }

/// Per-pixel equality on pixels where both masks are set.
inline bool equal_where(const Image& a, const Mask& va, const Image& b, const Mask& vb, std::size_t* compared = nullptr) {
    std::size_t n = 0;
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            if (!va(x, y) || !vb(x, y)) continue;
            ++n;
            for (int c = 0; c < a.channels; ++c)
                if (a.at(x, y, c) != b.at(x, y, c)) return false;
        }
    if (compared) *compared = n;
    return true;
}

inline double mean_abs_on(const Image& a, const Image& b, const Mask& sel) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < sel.size(); ++i)
        if (sel.data[i]) {
            s += std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]));
            ++n;
        }
    return n ? s / static_cast<double>(n) : 0.0;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline Image random_image(std::mt19937_64& gen, int w, int h, int channels) {
    Image img(w, h, channels);
    for (auto& v : img.data) v = static_cast<float>(synth_detail::unit_uniform(gen));
    return img;
}

inline DisparityMap random_disparity(std::mt19937_64& gen, int w, int h, double max_d, double invalid_rate) {
    DisparityMap d(w, h, 0.0f, false);
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (synth_detail::unit_uniform(gen) >= invalid_rate) {
            d.values[i] = static_cast<float>(synth_detail::unit_uniform(gen) * max_d);
            d.valid[i] = 1;
        }
    return d;
}

/// Random non-empty subset of the canonical sources, in canonical order.
inline std::vector<std::string> random_subset(std::mt19937_64& gen) {
    std::vector<std::string> out;
    while (out.empty())
        for (const char* l : kSourceLabels)
            if (gen() & 1u) out.emplace_back(l);
    return out;
}

/// Creates a unique scratch directory under the system temp dir.
inline std::filesystem::path make_temp_dir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "mbstereo-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw IoError("cannot create a temporary directory");
    return pattern;
}

// ---------------------------------------------------------------------------
// imageio

inline Outcome imageio_round_trip(const std::filesystem::path& dir, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::ostringstream why;
    bool ok = true;
    const auto quantized = [&](int channels, unsigned maxval) {
        Image img = random_image(gen, 13, 7, channels);
        for (auto& v : img.data) v = static_cast<float>(std::floor(v * maxval + 0.5) / maxval);
        return img;
    };
    const struct {
        const char* file;
        int channels;
        int depth;
    } cases[] = {{"g8.png", 1, 8}, {"g16.png", 1, 16}, {"c8.png", 3, 8}, {"c16.png", 3, 16},
                 {"g8.pgm", 1, 8}, {"g16.pgm", 1, 16}, {"c8.ppm", 3, 8}, {"c16.ppm", 3, 16}};
    for (const auto& c : cases) {
        const Image img = quantized(c.channels, c.depth == 8 ? 255u : 65535u);
        const auto path = (dir / c.file).string();
        store_image(path, img, c.depth);
        if (!(load_image(path) == img)) {
            ok = false;
            why << c.file << " differs; ";
        }
    }
    DisparityMap d = random_disparity(gen, 11, 9, 200.0, 0.2);
    store_disparity((dir / "d.pfm").string(), d, DisparityFormat::pfm);
    if (!(load_disparity((dir / "d.pfm").string(), DisparityFormat::pfm) == d)) {
        ok = false;
        why << "pfm differs; ";
    }
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (d.valid[i]) d.values[i] = static_cast<float>(std::max(1.0, std::floor(d.values[i] * 256.0 + 0.5)) / 256.0);
    store_disparity((dir / "d.png").string(), d, DisparityFormat::kitti_png);
    if (!(load_disparity((dir / "d.png").string(), DisparityFormat::kitti_png) == d)) {
        ok = false;
        why << "kitti png differs; ";
    }
    Mask m(10, 6, 0);
    for (auto& v : m.data) v = gen() & 1u;
    store_mask((dir / "m.png").string(), m);
    if (!(load_mask((dir / "m.png").string()) == m)) {
        ok = false;
        why << "mask differs; ";
    }
    return {ok, ok ? "png/pgm/ppm at 8 and 16 bit, pfm, kitti png, mask: identical" : why.str()};
}

inline Outcome imageio_ranges(const std::filesystem::path& dir, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Image img = random_image(gen, 9, 5, 3);
    img.data[0] = 0.0f;
    img.data[1] = 1.0f;
    store_image((dir / "r.png").string(), img, 16);
    const Image back = load_image((dir / "r.png").string());
    const bool in_unit = std::all_of(back.data.begin(), back.data.end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
    // A PFM carrying negative and non-finite samples must load them as invalid.
    std::string pfm = "Pf\n4 1\n-1\n";
    for (float v : {1.5f, -2.0f, std::numeric_limits<float>::quiet_NaN(), 3.0f}) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b) pfm.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    write_file_atomic((dir / "neg.pfm").string(), pfm);
    const DisparityMap d = load_disparity((dir / "neg.pfm").string(), DisparityFormat::pfm);
    bool nonneg = true;
    for (std::size_t i = 0; i < d.values.size(); ++i) nonneg = nonneg && (!d.valid[i] || d.values[i] >= 0.0f);
    const bool flags = d.valid == std::vector<std::uint8_t>{1, 0, 0, 1};
    return {in_unit && nonneg && flags, std::string("samples in [0,1]: ") + (in_unit ? "yes" : "no") +
                                            ", valid disparities >= 0: " + (nonneg && flags ? "yes" : "no")};
}

inline Outcome resample_constant(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    int trials = 0;
    for (int t = 0; t < 20; ++t) {
        const float c = static_cast<float>(synth_detail::unit_uniform(gen));
        const Image img(1 + static_cast<int>(gen() % 40), 1 + static_cast<int>(gen() % 40), (gen() & 1u) ? 3 : 1, c);
        const Image out = resample_bilinear(img, 1 + static_cast<int>(gen() % 60), 1 + static_cast<int>(gen() % 60));
        if (!std::all_of(out.data.begin(), out.data.end(), [c](float v) { return v == c; }))
            return {false, "constant " + fmt(c) + " not preserved"};
        ++trials;
    }
    return {true, std::to_string(trials) + " random constant images preserved exactly"};
}

// ---------------------------------------------------------------------------
// geometry

inline Outcome zero_warp_identity(const std::vector<SyntheticScene>& suite) {
    for (const auto& sc : suite)
        for (const char* l : kSourceLabels) {
            const Image& src = sc.image(l);
            const DisparityMap zero(src.width, src.height, 0.0f);
            const auto w = warp_to_left(src, zero, *canonical_scale(l));
            if (!(w.image == src) || std::count(w.valid.data.begin(), w.valid.data.end(), 0) != 0)
                return {false, std::string("view ") + l + " changed under zero disparity"};
        }
    return {true, "all suite views unchanged"};
}

inline Outcome warp_composition(const std::vector<SyntheticScene>& suite) {
    std::size_t compared = 0;
    for (const auto& sc : suite)
        for (const char* l : kSourceLabels)
            for (double X : {2.0, 0.5, 4.0}) {
                const double s = *canonical_scale(l);
                const auto a = warp_to_left(sc.image(l), sc.gt_disparity_left, s);
                const auto b = warp_to_left(sc.image(l), scale_disparity(sc.gt_disparity_left, X), effective_scale(s, X));
                std::size_t n = 0;
                if (!equal_where(a.image, a.valid, b.image, b.valid, &n))
                    return {false, std::string("view ") + l + " X=" + fmt(X) + " differs"};
                compared += n;
            }
    return {true, std::to_string(compared) + " pixel samples equal (X in {2, 0.5, 4})"};
}

inline Outcome warp_validity_predicate(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (int t = 0; t < 20; ++t) {
        const int w = 5 + static_cast<int>(gen() % 40), h = 1 + static_cast<int>(gen() % 8);
        const double scale = synth_detail::unit_uniform(gen) * 6.0 - 3.0;
        const DisparityMap d = random_disparity(gen, w, h, 2.0 * w, 0.1);
        const auto r = warp_to_left(random_image(gen, w, h, 1), d, scale);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double u = x - scale * static_cast<double>(d.value(x, y));
                const bool expect = d.is_valid(x, y) && u >= 0.0 && u <= w - 1;
                if ((r.valid(x, y) != 0) != expect) return {false, "validity disagrees with the out-of-frame predicate"};
            }
    }
    return {true, "20 random maps and scales agree"};
}

// ---------------------------------------------------------------------------
// photometric

inline Outcome min_monotonicity(const std::vector<SyntheticScene>& suite, int trials, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::size_t pixels = 0;
    for (int t = 0; t < trials; ++t) {
        const auto& sc = suite[gen() % suite.size()];
        const auto subset = random_subset(gen);
        std::vector<std::string> extra;
        for (const char* l : kSourceLabels)
            if (std::find(subset.begin(), subset.end(), l) == subset.end()) extra.emplace_back(l);
        if (extra.empty()) continue;
        std::vector<std::string> bigger = subset;
        bigger.push_back(extra[gen() % extra.size()]);
        DisparityMap d = sc.gt_disparity_left;
        for (auto& v : d.values) v = static_cast<float>(std::max(0.0, v + synth_detail::unit_uniform(gen) * 4.0 - 2.0));
        const auto small = min_warping_loss(sc.view_set(subset), d);
        const auto big = min_warping_loss(sc.view_set(bigger), d);
        for (std::size_t i = 0; i < small.values.size(); ++i) {
            if (!small.valid.data[i]) continue;
            ++pixels;
            if (!big.valid.data[i] || big.values.data[i] > small.values.data[i])
                return {false, "adding a view increased the loss at a valid pixel (trial " + std::to_string(t) + ")"};
        }
    }
    return {true, std::to_string(trials) + " trials, " + std::to_string(pixels) + " valid pixels, never increased"};
}

/// Mean over pixels visible in >= 1 source view of the min loss at GT vs GT + delta.
inline Outcome loss_basin(const std::vector<SyntheticScene>& suite) {
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& sc : suite) {
        Mask visible(sc.spec.width, sc.spec.height, 0);
        for (const char* l : kSourceLabels) {
            const Mask c = analytic_covisibility(sc, l);
            for (std::size_t i = 0; i < c.size(); ++i) visible.data[i] |= c.data[i];
        }
        const auto views = sc.view_set();
        const double at_gt = reduce_loss(min_warping_loss(views, sc.gt_disparity_left), &visible);
        for (int delta : {-4, -3, -2, 2, 3, 4}) {
            DisparityMap d = sc.gt_disparity_left;
            for (auto& v : d.values) v = std::max(0.0f, v + static_cast<float>(delta));
            const double off = reduce_loss(min_warping_loss(views, d), &visible);
            if (!(at_gt < off))
                return {false, "seed " + std::to_string(sc.spec.seed) + " delta " + std::to_string(delta) + ": " +
                                   fmt(at_gt) + " >= " + fmt(off)};
            worst_margin = std::min(worst_margin, off - at_gt);
        }
    }
    return {true, "loss at GT below GT+-{2,3,4} on every scene; smallest gap " + fmt(worst_margin)};
}

inline Outcome photometric_symmetry(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (int t = 0; t < 10; ++t) {
        const int w = 3 + static_cast<int>(gen() % 30), h = 3 + static_cast<int>(gen() % 30), c = (gen() & 1u) ? 3 : 1;
        const Image a = random_image(gen, w, h, c), b = random_image(gen, w, h, c);
        if (!(photometric_error(a, b) == photometric_error(b, a))) return {false, "L_pe(a,b) != L_pe(b,a)"};
        const auto self = photometric_error(a, a);
        if (!std::all_of(self.data.begin(), self.data.end(), [](double v) { return std::abs(v) < 1e-12; }))
            return {false, "L_pe(a,a) != 0"};
        const auto diff = photometric_error(a, b);
        for (std::size_t i = 0; i < diff.size(); ++i)
            if (a.data[i * c] != b.data[i * c] && !(diff.data[i] > 0.0)) return {false, "L_pe zero for distinct inputs"};
    }
    return {true, "symmetric, zero on identical textured inputs, positive otherwise"};
}

// ---------------------------------------------------------------------------
// masks

inline Outcome oof_monotone(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (int t = 0; t < 20; ++t) {
        const int w = 4 + static_cast<int>(gen() % 60), h = 1 + static_cast<int>(gen() % 10);
        const DisparityMap d = random_disparity(gen, w, h, w, 0.1);
        DisparityMap up = d;
        for (std::size_t i = 0; i < up.values.size(); ++i)
            if (up.valid[i]) up.values[i] += static_cast<float>(synth_detail::unit_uniform(gen) * 5.0);
        const Mask a = oof_mask(d), b = oof_mask(up);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.data[i] && !b.data[i]) return {false, "raising a disparity cleared an oof pixel"};
    }
    return {true, "20 random maps: raising disparities never clears oof"};
}

inline Outcome mask_fidelity(const std::vector<SyntheticScene>& suite) {
    std::size_t inter = 0, uni = 0, analytic = 0;
    for (const auto& sc : suite) {
        const auto& am = sc.analytic_masks.at("r");
        const auto lr = lr_region_masks(sc.gt_disparity_left, sc.gt_disparity_right);
        if (!(lr.oof == am.oof)) return {false, "oof mask differs from analytic oof (seed " + std::to_string(sc.spec.seed) + ")"};
        for (std::size_t i = 0; i < am.occ.size(); ++i) {
            if (am.oof.data[i]) continue;  // compare occlusion on in-frame pixels
            const bool a = am.occ.data[i], b = lr.occ.data[i];
            inter += a && b;
            uni += a || b;
            analytic += a;
        }
    }
    const double iou = uni ? static_cast<double>(inter) / uni : 1.0;
    const double recall = analytic ? static_cast<double>(inter) / analytic : 1.0;
    return {iou >= 0.9 && recall >= 0.95 && analytic > 0,
            "IoU " + fmt(iou) + " (>= 0.9), recall " + fmt(recall) + " (>= 0.95), oof exact"};
}

inline Outcome mask_determinism(const std::vector<SyntheticScene>& suite) {
    for (const auto& sc : suite) {
        const auto a = lr_region_masks(sc.gt_disparity_left, sc.gt_disparity_right);
        const auto b = lr_region_masks(sc.gt_disparity_left, sc.gt_disparity_right);
        if (!(a.occ == b.occ) || !(a.oof == b.oof)) return {false, "repeated mask computation differs"};
        // Idempotence: removing the flagged pixels and re-checking flags nothing new.
        DisparityMap kept = sc.gt_disparity_left;
        for (int y = 0; y < kept.height; ++y)
            for (int x = 0; x < kept.width; ++x)
                if (a.occ(x, y)) kept.invalidate(x, y);
        const Mask again = occlusion_mask(kept, sc.gt_disparity_right);
        if (std::count(again.data.begin(), again.data.end(), 1) != 0) return {false, "re-applying the check flags new pixels"};
    }
    return {true, "repeatable; re-checking the surviving pixels flags nothing"};
}

// ---------------------------------------------------------------------------
// synth

inline Outcome synth_determinism(const std::vector<SceneSpec>& specs) {
    for (const auto& spec : specs) {
        const auto a = generate_scene(spec), b = generate_scene(spec);
        if (!(a.images == b.images) || !(a.gt_disparity_left == b.gt_disparity_left) ||
            !(a.gt_disparity_right == b.gt_disparity_right))
            return {false, "seed " + std::to_string(spec.seed) + " not reproducible"};
        for (const auto& [k, m] : a.analytic_masks)
            if (!(m.occ == b.analytic_masks.at(k).occ) || !(m.oof == b.analytic_masks.at(k).oof))
                return {false, "analytic masks not reproducible"};
    }
    return {true, std::to_string(specs.size()) + " specs regenerate bit-identically"};
}

inline Outcome synth_warp_consistency(const std::vector<SyntheticScene>& integer_suite,
                                      const std::vector<SyntheticScene>& fractional_suite) {
    std::size_t exact = 0;
    for (const auto& sc : integer_suite)
        for (const char* l : kSourceLabels) {
            const auto cov = analytic_covisibility(sc, l);
            const auto w = warp_to_left(sc.image(l), sc.gt_disparity_left, *canonical_scale(l));
            std::size_t n = 0;
            if (!equal_where(w.image, cov, sc.image("l"), cov, &n))
                return {false, "integer seed " + std::to_string(sc.spec.seed) + " view " + l + " not exact"};
            exact += n;
        }
    double worst = 0.0;
    for (const auto& sc : fractional_suite)
        for (const char* l : kSourceLabels) {
            const auto cov = analytic_covisibility(sc, l);
            const auto w = warp_to_left(sc.image(l), sc.gt_disparity_left, *canonical_scale(l));
            worst = std::max(worst, mean_abs_on(w.image, sc.image("l"), cov));
        }
    return {worst <= 0.02, std::to_string(exact) + " co-visible integer-mode samples exact; fractional worst mean abs " +
                               fmt(worst) + " (<= 0.02)"};
}

inline Outcome synth_complementarity(std::uint64_t seed) {
    int scenes = 0;
    std::size_t covered = 0;
    for (std::uint64_t s = seed; scenes < 20 && s < seed + 400; ++s) {
        const auto spec = make_suite_spec(s);
        if (!layers_isolated(spec)) continue;
        ++scenes;
        const auto sc = generate_scene(spec);
        const auto& occ_r = sc.analytic_masks.at("r").occ;
        const auto ll = analytic_covisibility(sc, "ll");
        for (std::size_t i = 0; i < ll.size(); ++i) {
            if (!occ_r.data[i]) continue;
            if (!ll.data[i]) return {false, "seed " + std::to_string(s) + ": r-occluded pixel hidden in ll"};
            ++covered;
        }
    }
    return {scenes > 0, std::to_string(covered) + " r-occluded pixels on " + std::to_string(scenes) +
                            " isolated-layer scenes, all visible in ll"};
}

// ---------------------------------------------------------------------------
// matcher

inline Outcome oracle_equivalence(int scenes, std::uint64_t seed) {
    for (int k = 0; k < scenes; ++k) {
        const std::uint64_t s = seed + 1000 + static_cast<std::uint64_t>(k);
        const auto sc = generate_scene(make_suite_spec(s, 32, 32, k % 2 == 1));
        std::mt19937_64 gen(s);
        const auto views = sc.view_set(random_subset(gen));
        const int d_max = 12;
        if (!(photometric_match(views, d_max) == reference::photometric_match(views, d_max)))
            return {false, "scene " + std::to_string(s) + " differs from the naive reference"};
    }
    return {true, std::to_string(scenes) + " scenes at 32x32 bit-identical to the naive reference"};
}

inline Outcome fuse_monotone(const std::vector<SyntheticScene>& suite) {
    for (const auto& sc : suite) {
        std::vector<CostVolume> vols;
        CostVolume prev;
        for (const char* l : kSourceLabels) {
            vols.push_back(census_cost(sc.image("l"), sc.image(l), *canonical_scale(l), 32));
            const CostVolume fused = fuse_multibaseline(vols);
            if (vols.size() > 1)
                for (std::size_t i = 0; i < fused.costs.size(); ++i)
                    if (prev.valid[i] && (!fused.valid[i] || fused.costs[i] > prev.costs[i]))
                        return {false, "adding a volume increased a fused entry"};
            prev = fused;
        }
    }
    return {true, "adding r, ll, rr, c in turn never increases a fused entry"};
}

inline Outcome sgm_zero_penalties(const std::vector<SyntheticScene>& suite) {
    const auto& sc = suite.front();
    const CostVolume raw = census_cost(sc.image("l"), sc.image("r"), 1.0, 32);
    for (int paths : {4, 8}) {
        SgmParams p;
        p.p1 = 0.0f;
        p.p2 = 0.0f;
        p.paths = paths;
        const CostVolume agg = sgm_aggregate(raw, p);
        for (std::size_t i = 0; i < raw.costs.size(); ++i)
            if (raw.valid[i] && agg.costs[i] != static_cast<float>(paths) * raw.costs[i])
                return {false, "P1=P2=0 does not reproduce paths x cost"};
    }
    return {true, "4 and 8 paths reproduce paths x raw cost on valid entries"};
}

inline Outcome matcher_determinism(const std::vector<SyntheticScene>& suite) {
    const auto& sc = suite.front();
    const auto views = sc.view_set({"r", "ll", "rr"});
    const auto a = sgm_match(views, 32), b = sgm_match(views, 32);
    const auto c = photometric_match(sc.view_set({"r", "ll"}), 32), d = photometric_match(sc.view_set({"r", "ll"}), 32);
    return {a == b && c == d, a == b && c == d ? "sgm_match and photometric_match repeat bit-identically"
                                               : "repeated matching differs"};
}

// ---------------------------------------------------------------------------
// metrics

inline Outcome metric_permutation(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const int w = 40, h = 30;
    const DisparityMap pred = random_disparity(gen, w, h, 30.0, 0.2), gt = random_disparity(gen, w, h, 30.0, 0.1);
    RegionMasks m{Mask(w, h, 0), Mask(w, h, 0)};
    for (auto& v : m.occ.data) v = (gen() % 4) == 0;
    for (auto& v : m.oof.data) v = (gen() % 6) == 0;
    std::vector<std::size_t> perm(gt.values.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    DisparityMap p2 = pred, g2 = gt;
    RegionMasks m2 = m;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        p2.values[i] = pred.values[perm[i]];
        p2.valid[i] = pred.valid[perm[i]];
        g2.values[i] = gt.values[perm[i]];
        g2.valid[i] = gt.valid[perm[i]];
        m2.occ.data[i] = m.occ.data[perm[i]];
        m2.oof.data[i] = m.oof.data[perm[i]];
    }
    const auto a = disparity_metrics(pred, gt, &m), b = disparity_metrics(p2, g2, &m2);
    if (a.size() != b.size()) return {false, "region sets differ"};
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& x = a[k].second;
        const auto& y = b[k].second;
        if (x.pixels != y.pixels || x.predicted != y.predicted || x.outlier_fraction != y.outlier_fraction ||
            x.d1_percent != y.d1_percent || !close_rel(*x.epe, *y.epe, 1e-12))
            return {false, "region " + a[k].first + " changed under a pixel permutation"};
    }
    return {true, "all/occ/oof/noc stats invariant under a random pixel permutation"};
}

inline Outcome epe_symmetry(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (int t = 0; t < 10; ++t) {
        const DisparityMap a = random_disparity(gen, 23, 17, 40.0, 0.0), b = random_disparity(gen, 23, 17, 40.0, 0.0);
        if (*region_disparity_stats(a, b, nullptr).epe != *region_disparity_stats(b, a, nullptr).epe)
            return {false, "EPE(a,b) != EPE(b,a)"};
    }
    return {true, "EPE(a,b) == EPE(b,a) on 10 random pairs"};
}

inline Outcome region_partition(const std::vector<SyntheticScene>& suite, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (const auto& sc : suite) {
        // Disjoint by construction: occ excludes oof.
        RegionMasks m = sc.analytic_masks.at("r");
        for (std::size_t i = 0; i < m.occ.size(); ++i)
            if (m.oof.data[i]) m.occ.data[i] = 0;
        DisparityMap pred = sc.gt_disparity_left;
        for (std::size_t i = 0; i < pred.values.size(); ++i)
            if (gen() % 5 == 0) pred.invalidate(static_cast<int>(i % pred.width), static_cast<int>(i / pred.width));
        std::map<std::string, std::size_t> count;
        for (const auto& [name, st] : disparity_metrics(pred, sc.gt_disparity_left, &m)) count[name] = st.pixels;
        if (count["all"] != count["occ"] + count["oof"] + count["noc"])
            return {false, "all != occ + oof + noc on seed " + std::to_string(sc.spec.seed)};
    }
    return {true, "all = occ + oof + noc pixel counts on every suite scene"};
}

inline Outcome depth_scale_invariance(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const int w = 31, h = 19;
    Grid<double> p(w, h), g(w, h);
    Mask valid(w, h, 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        g.data[i] = 1.0 + 79.0 * synth_detail::unit_uniform(gen);
        p.data[i] = g.data[i] * (0.5 + synth_detail::unit_uniform(gen));
    }
    const auto base = depth_metrics(p, g, valid);
    for (double c : {0.1, 3.7, 250.0}) {
        Grid<double> pc = p, gc = g;
        for (auto& v : pc.data) v *= c;
        for (auto& v : gc.data) v *= c;
        const auto s = depth_metrics(pc, gc, valid);
        const bool ok = close_rel(s.abs_rel, base.abs_rel, 1e-12) && close_rel(s.rmse_log, base.rmse_log, 1e-9) &&
                        s.a1 == base.a1 && s.a2 == base.a2 && s.a3 == base.a3 &&
                        close_rel(s.rmse, c * base.rmse, 1e-12) && close_rel(s.sq_rel, c * base.sq_rel, 1e-12);
        if (!ok) return {false, "scaling by " + fmt(c) + " broke invariance"};
    }
    return {true, "AbsRel, RMSElog, A1-A3 invariant; RMSE and SqRel scale by c (c in {0.1, 3.7, 250})"};
}

}  // namespace validate_detail

/// Runs every property check. Each check is independent; an exception inside a check fails that
/// check with the exception text.
inline std::vector<CheckResult> run_validation(const ValidationOptions& opts = {}) {
    using namespace validate_detail;
    require(opts.suite_scenes >= 1 && opts.oracle_scenes >= 1 && opts.monotonicity_trials >= 1,
            "validation: counts must be >= 1");
    std::vector<SceneSpec> specs, fractional_specs;
    std::vector<SyntheticScene> suite, fractional;
    for (int k = 0; k < opts.suite_scenes; ++k) {
        specs.push_back(make_suite_spec(opts.seed + static_cast<std::uint64_t>(k)));
        fractional_specs.push_back(make_suite_spec(opts.seed + static_cast<std::uint64_t>(k), 256, 128, true));
        suite.push_back(generate_scene(specs.back()));
        fractional.push_back(generate_scene(fractional_specs.back()));
    }

    std::filesystem::path dir = opts.work_dir;
    const bool own_dir = dir.empty();
    if (own_dir) dir = make_temp_dir();
    else std::filesystem::create_directories(dir);

    const std::uint64_t s = opts.seed;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
        {"imageio.round_trip", [&] { return imageio_round_trip(dir, s); }},
        {"imageio.value_ranges", [&] { return imageio_ranges(dir, s); }},
        {"imageio.resample_constant", [&] { return resample_constant(s); }},
        {"geometry.zero_disparity_identity", [&] { return zero_warp_identity(suite); }},
        {"geometry.composition", [&] { return warp_composition(suite); }},
        {"geometry.validity_predicate", [&] { return warp_validity_predicate(s); }},
        {"photometric.min_monotonicity", [&] { return min_monotonicity(suite, opts.monotonicity_trials, s); }},
        {"photometric.loss_basin", [&] { return loss_basin(suite); }},
        {"photometric.symmetry_and_zero", [&] { return photometric_symmetry(s); }},
        {"masks.oof_monotone", [&] { return oof_monotone(s); }},
        {"masks.fidelity", [&] { return mask_fidelity(suite); }},
        {"masks.determinism_idempotence", [&] { return mask_determinism(suite); }},
        {"synth.determinism", [&] {
             auto all = specs;
             all.insert(all.end(), fractional_specs.begin(), fractional_specs.end());
             return synth_determinism(all);
         }},
        {"synth.warp_consistency", [&] { return synth_warp_consistency(suite, fractional); }},
        {"synth.occlusion_complementarity", [&] { return synth_complementarity(s); }},
        {"matcher.oracle_equivalence", [&] { return oracle_equivalence(opts.oracle_scenes, s); }},
        {"matcher.fuse_monotonicity", [&] { return fuse_monotone(suite); }},
        {"matcher.sgm_zero_penalties", [&] { return sgm_zero_penalties(suite); }},
        {"matcher.determinism", [&] { return matcher_determinism(suite); }},
        {"metrics.permutation_invariance", [&] { return metric_permutation(s); }},
        {"metrics.epe_symmetry", [&] { return epe_symmetry(s); }},
        {"metrics.region_partition", [&] { return region_partition(suite, s); }},
        {"metrics.depth_scale_invariance", [&] { return depth_scale_invariance(s); }},
    };

    std::vector<CheckResult> results;
    for (const auto& [name, fn] : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r{name, false, "", 0.0};
        try {
            const Outcome o = fn();
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(r));
    }
    if (own_dir) {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    return results;
}

}  // namespace mbstereo

#endif
