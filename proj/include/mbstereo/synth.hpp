#ifndef MBSTEREO_SYNTH_HPP
#define MBSTEREO_SYNTH_HPP

// Deterministic multi-baseline scene generator: fronto-parallel textured rectangles over a
// textured background, rendered into the five views ll, l, c, r, rr. Geometry is closed-form,
// so ground-truth disparity and per-view visibility are exact.

#include "core.hpp"
#include "geometry.hpp"
#include "masks.hpp"

#include <array>
#include <charconv>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace mbstereo {

struct LayerSpec {
    int x = 0;
    int y = 0;
    int width = 1;
    int height = 1;
    double disparity = 0.0;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct SceneSpec {
    std::uint64_t seed = 0;
    int width = 256;
    int height = 128;
    std::vector<LayerSpec> layers;
    double background_disparity = 2.0;
    int texture_smoothness = 1;  // box-blur radius of the noise texture
    int texture_blur_passes = 1; // repeated box blurs approach a Gaussian and suppress fine detail
    bool fractional = false;     // false: even-integer disparities, every view shift is whole pixels

    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;

    void validate() const {
        require(width >= 1 && height >= 1, "SceneSpec: dimensions must be >= 1");
        require(texture_smoothness >= 0, "SceneSpec: texture_smoothness must be >= 0");
        require(texture_blur_passes >= 1, "SceneSpec: texture_blur_passes must be >= 1");
        require(std::isfinite(background_disparity) && background_disparity >= 0.0,
                "SceneSpec: background disparity must be finite and >= 0");
        const auto check_integral = [this](double d) {
            if (!fractional && (d != std::floor(d) || std::fmod(d, 2.0) != 0.0))
                throw InvalidArgument("SceneSpec: integer mode needs even integer disparities (center view scale 0.5)");
        };
        check_integral(background_disparity);
        for (const auto& l : layers) {
            require(l.width >= 1 && l.height >= 1, "SceneSpec: empty layer rectangle");
            require(l.x >= 0 && l.y >= 0 && l.x + l.width <= width && l.y + l.height <= height,
                    "SceneSpec: layer rectangle leaves the frame");
            require(std::isfinite(l.disparity) && l.disparity > background_disparity,
                    "SceneSpec: layer disparity must exceed the background disparity");
            check_integral(l.disparity);
        }
    }
};

inline constexpr std::array<const char*, 5> kSceneViewLabels = {"ll", "l", "c", "r", "rr"};
inline constexpr std::array<const char*, 4> kSourceLabels = {"r", "ll", "rr", "c"};

struct SyntheticScene {
    SceneSpec spec;
    std::map<std::string, Image> images;  // keyed by ll, l, c, r, rr
    DisparityMap gt_disparity_left;
    DisparityMap gt_disparity_right;
    std::map<std::string, RegionMasks> analytic_masks;  // left view vs each source view

    const Image& image(const std::string& label) const {
        const auto it = images.find(label);
        if (it == images.end()) throw InvalidArgument("SyntheticScene: unknown view '" + label + "'");
        return it->second;
    }

    /// ViewSet with target l and the requested sources at their canonical scales.
    ViewSet view_set(const std::vector<std::string>& labels) const {
        ViewSet vs{image("l"), {}};
        for (const auto& name : labels) {
            const auto s = canonical_scale(name);
            if (!s || name == "l") throw InvalidArgument("SyntheticScene: '" + name + "' is not a source view");
            vs.sources.push_back({name, image(name), *s});
        }
        return vs;
    }

    ViewSet view_set() const { return view_set({kSourceLabels.begin(), kSourceLabels.end()}); }
};

namespace synth_detail {

// Back-to-front drawing order: ascending disparity, ties by declaration order.
inline std::vector<int> render_order(const SceneSpec& spec) {
    std::vector<int> order(spec.layers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return spec.layers[a].disparity < spec.layers[b].disparity;
    });
    return order;
}

/// Index of the front-most layer covering abscissa u on row y of the view with this scale; -1 is background.
inline int front_layer(const SceneSpec& spec, const std::vector<int>& order, double scale, double u, int y) {
    int top = -1;
    for (int k : order) {
        const auto& l = spec.layers[k];
        if (y < l.y || y >= l.y + l.height) continue;
        const double lo = l.x - scale * l.disparity;
        if (u >= lo && u < lo + l.width) top = k;
    }
    return top;
}

inline double surface_disparity(const SceneSpec& spec, int k) {
    return k < 0 ? spec.background_disparity : spec.layers[k].disparity;
}

// Noise texture anchored in left-view coordinates over columns [x0, x0 + grid.width).
struct Texture {
    int x0 = 0;
    Grid<float> grid;

    float sample(double xl, int y) const {
        const double u = xl - x0;
        const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, grid.width - 1);
        const int i1 = std::min(i0 + 1, grid.width - 1);
        const double f = u - std::floor(u);
        const double a = grid(i0, y), b = grid(i1, y);
        return f == 0.0 ? static_cast<float>(a) : static_cast<float>(a + f * (b - a));
    }
};

inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1p-53; }

inline Grid<float> box_blur(const Grid<float>& in, int radius) {
    if (radius == 0) return in;
    Grid<float> tmp(in.width, in.height), out(in.width, in.height);
    const double norm = 2.0 * radius + 1.0;
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += in(std::clamp(x + k, 0, in.width - 1), y);
            tmp(x, y) = static_cast<float>(s / norm);
        }
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += tmp(x, std::clamp(y + k, 0, in.height - 1));
            out(x, y) = static_cast<float>(s / norm);
        }
    return out;
}

inline constexpr double kTextureMean = 0.5;
inline constexpr double kTextureStd = 0.2;
inline constexpr double kMinRawTextureStd = 1e-4;

/// Smoothed seeded noise, normalized to a fixed mean and contrast and quantized to 16 bits so
/// that rendered integer-mode views survive a 16-bit PNG round trip unchanged.
inline Grid<float> make_texture(std::uint64_t seed, int surface, int width, int height, int radius, int passes = 1) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(surface + 1), 0x7e47u};
    std::mt19937_64 gen(seq);
    Grid<float> g(width, height);
    for (auto& v : g.data) v = static_cast<float>(unit_uniform(gen));
    for (int p = 0; p < passes; ++p) g = box_blur(g, radius);
    double mean = 0.0;
    for (float v : g.data) mean += v;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (float v : g.data) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(g.size()));
    if (sd < kMinRawTextureStd) throw InvalidArgument("make_texture: texture variance below minimum");
    for (auto& v : g.data) {
        const double n = std::clamp(kTextureMean + (v - mean) * (kTextureStd / sd), 0.0, 1.0);
        v = static_cast<float>(std::floor(n * 65535.0 + 0.5) / 65535.0);
    }
    return g;
}

inline constexpr int kTexturePad = 4;

}  // namespace synth_detail

/// Renders all five views, both ground-truth disparity maps and the analytic region masks.
/// Identical specs produce bit-identical scenes.
inline SyntheticScene generate_scene(const SceneSpec& spec) {
    using namespace synth_detail;
    spec.validate();
    const int w = spec.width, h = spec.height;
    const auto order = render_order(spec);

    std::vector<Texture> textures;  // textures[k + 1] belongs to surface k
    {
        const int margin = static_cast<int>(std::ceil(2.0 * spec.background_disparity)) + kTexturePad;
        textures.push_back({-margin, make_texture(spec.seed, -1, w + 2 * margin, h, spec.texture_smoothness,
                                                     spec.texture_blur_passes)});
        for (std::size_t k = 0; k < spec.layers.size(); ++k) {
            const auto& l = spec.layers[k];
            textures.push_back({l.x - kTexturePad,
                                make_texture(spec.seed, static_cast<int>(k), l.width + 2 * kTexturePad, h,
                                             spec.texture_smoothness, spec.texture_blur_passes)});
        }
    }

    SyntheticScene scene;
    scene.spec = spec;
    for (const char* label : kSceneViewLabels) {
        const double s = *canonical_scale(label);
        Image img(w, h, 1);
        for (int y = 0; y < h; ++y)
            for (int u = 0; u < w; ++u) {
                const int k = front_layer(spec, order, s, u, y);
                img.at(u, y) = textures[k + 1].sample(u + s * surface_disparity(spec, k), y);
            }
        scene.images.emplace(label, std::move(img));
    }

    scene.gt_disparity_left = DisparityMap(w, h);
    scene.gt_disparity_right = DisparityMap(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            scene.gt_disparity_left.set(x, y, static_cast<float>(surface_disparity(spec, front_layer(spec, order, 0.0, x, y))));
            scene.gt_disparity_right.set(x, y, static_cast<float>(surface_disparity(spec, front_layer(spec, order, 1.0, x, y))));
        }

    for (const char* label : kSourceLabels) {
        const double s = *canonical_scale(label);
        RegionMasks rm{Mask(w, h, 0), Mask(w, h, 0)};
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int k = front_layer(spec, order, 0.0, x, y);
                const double u = x - s * surface_disparity(spec, k);
                if (!sample_in_frame(u, w)) rm.oof(x, y) = 1;
                else if (front_layer(spec, order, s, u, y) != k) rm.occ(x, y) = 1;
            }
        scene.analytic_masks.emplace(label, std::move(rm));
    }
    return scene;
}

/// True where the left-view scene point is unoccluded and in frame in the named view,
/// recomputed by z-ordering at the shifted abscissa.
inline Mask analytic_covisibility(const SyntheticScene& scene, const std::string& label) {
    const auto s = canonical_scale(label);
    if (!s || !scene.images.count(label)) throw InvalidArgument("analytic_covisibility: unknown view '" + label + "'");
    const auto& spec = scene.spec;
    const auto order = synth_detail::render_order(spec);
    Mask m(spec.width, spec.height, 0);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const int k = synth_detail::front_layer(spec, order, 0.0, x, y);
            const double u = x - *s * synth_detail::surface_disparity(spec, k);
            m(x, y) = sample_in_frame(u, spec.width) && synth_detail::front_layer(spec, order, *s, u, y) == k ? 1 : 0;
        }
    return m;
}

/// True when no two row-overlapping layers come within each other's disparity reach: the
/// intervals [x - d, x + width + d) are pairwise disjoint. Then every left-view pixel has at most
/// one occluder across the ll..r views, so a pixel hidden in r is visible in ll (a single
/// fronto-parallel occluder cannot hide a left-visible point from both sides).
inline bool layers_isolated(const SceneSpec& spec) {
    const auto& ls = spec.layers;
    for (std::size_t i = 0; i < ls.size(); ++i)
        for (std::size_t j = i + 1; j < ls.size(); ++j) {
            const auto& a = ls[i];
            const auto& b = ls[j];
            if (a.y >= b.y + b.height || b.y >= a.y + a.height) continue;
            if (a.x - a.disparity < b.x + b.width + b.disparity && b.x - b.disparity < a.x + a.width + a.disparity)
                return false;
        }
    return true;
}

/// One member of the standard scene family: three random textured rectangles over a background.
/// Integer mode uses even disparities up to 24 px; fractional mode uses arbitrary real ones.
inline SceneSpec make_suite_spec(std::uint64_t seed, int width = 256, int height = 128, bool fractional = false) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x517eu};
    std::mt19937_64 gen(seq);
    const auto uniform_int = [&gen](int lo, int hi) { return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1)); };
    SceneSpec spec;
    spec.seed = seed;
    spec.width = width;
    spec.height = height;
    spec.fractional = fractional;
    spec.texture_smoothness = 1;
    // Bilinear rendering of fractional shifts needs smoother texture to keep interpolation error small.
    spec.texture_blur_passes = fractional ? 3 : 1;
    spec.background_disparity = 2.0 * uniform_int(1, 3);
    const int max_w = std::max(4, std::min(60, width / 3));
    const int max_h = std::max(4, std::min(60, height / 2));
    for (int k = 0; k < 3; ++k) {
        LayerSpec l;
        l.width = uniform_int(std::max(2, max_w / 3), max_w);
        l.height = uniform_int(std::max(2, max_h / 3), max_h);
        l.x = uniform_int(0, width - l.width);
        l.y = uniform_int(0, height - l.height);
        l.disparity = spec.background_disparity + 2.0 * uniform_int(2, 9);
        if (fractional) l.disparity += synth_detail::unit_uniform(gen) * 1.5 - 0.75;
        spec.layers.push_back(l);
    }
    if (fractional) spec.background_disparity += synth_detail::unit_uniform(gen) * 0.9;
    return spec;
}

// ---------------------------------------------------------------------------
// Manifest: plain-text `key = value` record of a SceneSpec.

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string scene_manifest(const SceneSpec& spec) {
    std::ostringstream os;
    os << "seed = " << spec.seed << "\n"
       << "width = " << spec.width << "\n"
       << "height = " << spec.height << "\n"
       << "background_disparity = " << format_double(spec.background_disparity) << "\n"
       << "texture_smoothness = " << spec.texture_smoothness << "\n"
       << "texture_blur_passes = " << spec.texture_blur_passes << "\n"
       << "fractional = " << (spec.fractional ? 1 : 0) << "\n"
       << "layers = " << spec.layers.size() << "\n";
    for (std::size_t k = 0; k < spec.layers.size(); ++k) {
        const auto& l = spec.layers[k];
        os << "layer." << k << " = " << l.x << " " << l.y << " " << l.width << " " << l.height << " "
           << format_double(l.disparity) << "\n";
    }
    for (const char* label : kSceneViewLabels) os << "scale." << label << " = " << format_double(*canonical_scale(label)) << "\n";
    return os.str();
}

/// Parses a `key = value` text into a map. Blank lines and lines starting with '#' are skipped.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("line " + std::to_string(lineno) + ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline SceneSpec parse_scene_manifest(const std::string& text) {
    const auto kv = parse_key_values(text);
    const auto get = [&kv](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw InvalidArgument("manifest: missing key '" + key + "'");
        return it->second;
    };
    SceneSpec spec;
    spec.seed = std::stoull(get("seed"));
    spec.width = std::stoi(get("width"));
    spec.height = std::stoi(get("height"));
    spec.background_disparity = std::stod(get("background_disparity"));
    spec.texture_smoothness = std::stoi(get("texture_smoothness"));
    if (kv.count("texture_blur_passes")) spec.texture_blur_passes = std::stoi(kv.at("texture_blur_passes"));
    spec.fractional = std::stoi(get("fractional")) != 0;
    const int n = std::stoi(get("layers"));
    for (int k = 0; k < n; ++k) {
        std::istringstream ls(get("layer." + std::to_string(k)));
        LayerSpec l;
        if (!(ls >> l.x >> l.y >> l.width >> l.height >> l.disparity))
            throw InvalidArgument("manifest: malformed layer." + std::to_string(k));
        spec.layers.push_back(l);
    }
    spec.validate();
    return spec;
}

}  // namespace mbstereo

#endif
