#ifndef MBSTEREO_TOOLS_CLI_HPP
#define MBSTEREO_TOOLS_CLI_HPP

// Command-line front end. run() is callable in-process so the test suite can drive it.
//
// Every option may also come from a plain-text `key = value` file given with --config; keys are
// the long option names without dashes. File values are applied first, so flags override them.
// The resolved parameters of each run are echoed to run_config.txt in the output directory.

#include <mbstereo/mbstereo.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace mbstereo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;

namespace detail {

namespace fs = std::filesystem;

/// One registered parameter: its config key and how to print its resolved value.
struct Param {
    std::string key;
    std::function<std::string()> value;
};

struct Command {
    CLI::App* app = nullptr;
    std::vector<Param> params;

    template <typename T>
    CLI::Option* add(const std::string& key, T& var, const std::string& help) {
        auto* opt = app->add_option("--" + key, var, help)->capture_default_str()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        params.push_back({key, [&var] {
                              std::ostringstream os;
                              if constexpr (std::is_floating_point_v<T>) os << format_double(var);
                              else os << var;
                              return os.str();
                          }});
        return opt;
    }

    CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
        auto* opt = app->add_flag("--" + key, var, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        params.push_back({key, [&var] { return std::string(var ? "true" : "false"); }});
        return opt;
    }

    /// Resolved configuration in the config-file syntax, in registration order.
    std::string resolved() const {
        std::string out = "command = " + app->get_name() + "\n";
        for (const auto& p : params) out += p.key + " = " + p.value() + "\n";
        return out;
    }
};

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Moves `--config FILE` / `--config=FILE` out of the argument list and splices the file's
/// entries in as `--key=value` right after the subcommand name, ahead of the user's flags.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file argument");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::vector<std::string> injected;
    for (const auto& [k, v] : parse_key_values(read_text(path))) injected.push_back("--" + k + "=" + v);
    const auto at = args.empty() ? args.end() : args.begin() + 1;
    args.insert(at, injected.begin(), injected.end());
    return args;
}

inline void prepare_out_dir(const std::string& dir) {
    if (dir.empty()) throw InvalidArgument("--out must name an output directory");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

inline std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

/// Parses "r,ll,mid:0.25" into (name, scale) pairs; bare names use the canonical scale.
inline std::vector<std::pair<std::string, double>> parse_view_list(const std::string& text) {
    std::vector<std::pair<std::string, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        const std::string name = item.substr(0, colon);
        double scale = 0.0;
        if (colon != std::string::npos) {
            std::size_t used = 0;
            scale = std::stod(item.substr(colon + 1), &used);
            if (used != item.size() - colon - 1 || !std::isfinite(scale))
                throw InvalidArgument("bad scale in view '" + item + "'");
        } else if (const auto s = canonical_scale(name)) {
            scale = *s;
        } else {
            throw InvalidArgument("view '" + name + "' has no canonical scale; write it as name:scale");
        }
        if (name.empty() || name == "l") throw InvalidArgument("'" + item + "' is not a source view");
        out.emplace_back(name, scale);
    }
    if (out.empty()) throw InvalidArgument("empty view list");
    return out;
}

/// Loads l.png plus <name>.png for every requested source from a scene directory.
inline ViewSet load_views(const std::string& dir, const std::string& use) {
    ViewSet vs{load_image(join_path(dir, "l.png")), {}};
    for (const auto& [name, scale] : parse_view_list(use)) vs.sources.push_back({name, load_image(join_path(dir, name + ".png")), scale});
    vs.validate();
    return vs;
}

inline double scale_for(const std::string& view, double scale) {
    if (view.empty()) return scale;
    const auto s = canonical_scale(view);
    if (!s) throw InvalidArgument("unknown view label '" + view + "'");
    return *s;
}

inline DisparityFormat disparity_format(const std::string& path) {
    const auto ext = fs::path(path).extension().string();
    if (ext == ".pfm" || ext == ".PFM") return DisparityFormat::pfm;
    if (ext == ".png" || ext == ".PNG") return DisparityFormat::kitti_png;
    throw InvalidArgument("'" + path + "': disparity must be .pfm or KITTI .png");
}

inline DisparityMap load_disp(const std::string& path) { return load_disparity(path, disparity_format(path)); }

// ---------------------------------------------------------------------------
// Parameter blocks with their defaults

struct SynthParams {
    std::uint64_t seed = 0;
    int width = 256;
    int height = 128;
    bool fractional = false;
    std::string out;
};

struct WarpParams {
    std::string source, disparity, view;
    double scale = 1.0;
    std::string out;
};

struct MasksParams {
    std::string disp_left, disp_view, view;
    double scale = 1.0;
    double threshold = kDefaultConsistencyThreshold;
    std::string out;
};

struct LossMapParams {
    std::string views, disparity;
    std::string use = "r,ll,rr,c";
    double alpha = kDefaultAlpha;
    double max_loss = 0.5;
    std::string out;
};

struct MatchParams {
    std::string views;
    std::string mode = "sgm";
    std::string use = "r,ll,rr,c";
    int d_max = 32;
    double alpha = kDefaultAlpha;
    int window = 5;
    SgmParams sgm;
    std::string out;
};

struct EvalParams {
    std::string pred, gt, scene, occ, oof;
    std::string image_a, image_b;
    std::string left, right, left_b, right_b;
    double outlier_px = kDefaultOutlierPx;
    double focal_baseline = 0.0;
    double max_error = 5.0;
    std::string out;
};

struct ValidateParams {
    std::uint64_t seed = 0;
    int scenes = 10;
    int oracle_scenes = 20;
    int trials = 100;
    std::string work_dir;
};

// ---------------------------------------------------------------------------
// Commands

inline void finish(const Command& cmd, const std::string& out_dir) {
    write_file_atomic(join_path(out_dir, "run_config.txt"), cmd.resolved());
}

inline int do_synth(const Command& cmd, const SynthParams& p, std::ostream& out) {
    require(p.width >= 16 && p.height >= 8, "synth: scene must be at least 16x8");
    const SceneSpec spec = make_suite_spec(p.seed, p.width, p.height, p.fractional);
    const SyntheticScene scene = generate_scene(spec);
    prepare_out_dir(p.out);
    for (const auto& [label, img] : scene.images) store_image(join_path(p.out, label + ".png"), img, 16);
    store_disparity(join_path(p.out, "disp_left.pfm"), scene.gt_disparity_left, DisparityFormat::pfm);
    store_disparity(join_path(p.out, "disp_right.pfm"), scene.gt_disparity_right, DisparityFormat::pfm);
    for (const auto& [label, m] : scene.analytic_masks) {
        store_mask(join_path(p.out, "occ_" + label + ".png"), m.occ);
        store_mask(join_path(p.out, "oof_" + label + ".png"), m.oof);
    }
    write_file_atomic(join_path(p.out, "manifest.txt"), scene_manifest(spec));
    finish(cmd, p.out);
    out << "scene " << p.seed << " written to " << p.out << "\n";
    return kExitOk;
}

inline int do_warp(const Command& cmd, const WarpParams& p, std::ostream& out) {
    const Image src = load_image(p.source);
    const DisparityMap d = load_disp(p.disparity);
    const auto r = warp_to_left(src, d, scale_for(p.view, p.scale));
    prepare_out_dir(p.out);
    store_image(join_path(p.out, "warped.png"), r.image, 16);
    store_mask(join_path(p.out, "valid.png"), r.valid);
    finish(cmd, p.out);
    out << "valid pixels: " << std::count(r.valid.data.begin(), r.valid.data.end(), 1) << " of " << r.valid.size() << "\n";
    return kExitOk;
}

inline int do_masks(const Command& cmd, const MasksParams& p, std::ostream& out) {
    const DisparityMap dl = load_disp(p.disp_left);
    const DisparityMap dv = load_disp(p.disp_view);
    const Mask occ = occlusion_mask(dl, dv, p.threshold, scale_for(p.view, p.scale));
    const Mask oof = oof_mask(dl);
    prepare_out_dir(p.out);
    store_mask(join_path(p.out, "occ.png"), occ);
    store_mask(join_path(p.out, "oof.png"), oof);
    finish(cmd, p.out);
    out << "occ pixels: " << std::count(occ.data.begin(), occ.data.end(), 1)
        << ", oof pixels: " << std::count(oof.data.begin(), oof.data.end(), 1) << "\n";
    return kExitOk;
}

inline int do_loss_map(const Command& cmd, const LossMapParams& p, std::ostream& out) {
    require(p.max_loss > 0.0, "loss-map: --max-loss must be positive");
    const ViewSet views = load_views(p.views, p.use);
    const LossMap m = min_warping_loss(views, load_disp(p.disparity), p.alpha);
    Image labels(m.chosen.width, m.chosen.height, 1);
    for (std::size_t i = 0; i < m.chosen.size(); ++i) labels.data[i] = static_cast<float>(m.chosen.data[i] + 1) / 255.0f;
    prepare_out_dir(p.out);
    store_image(join_path(p.out, "loss.png"), heat_image(m.values, m.valid, p.max_loss));
    store_image(join_path(p.out, "chosen.png"), labels);
    std::string legend = "0 = invalid\n";
    for (std::size_t k = 0; k < m.labels.size(); ++k) legend += std::to_string(k + 1) + " = " + m.labels[k] + "\n";
    write_file_atomic(join_path(p.out, "chosen_labels.txt"), legend);
    finish(cmd, p.out);
    out << "mean loss over valid pixels: " << format_metric(reduce_loss(m)) << "\n";
    return kExitOk;
}

inline int do_match(const Command& cmd, const MatchParams& p, std::ostream& out) {
    const ViewSet views = load_views(p.views, p.use);
    DisparityMap d;
    if (p.mode == "photo") d = photometric_match(views, p.d_max, p.alpha, p.window);
    else if (p.mode == "sgm") d = sgm_match(views, p.d_max, p.sgm);
    else throw InvalidArgument("match: --mode must be photo or sgm");
    prepare_out_dir(p.out);
    store_disparity(join_path(p.out, "disparity.pfm"), d, DisparityFormat::pfm);
    finish(cmd, p.out);
    out << "valid pixels: " << std::count(d.valid.begin(), d.valid.end(), 1) << " of " << d.valid.size() << "\n";
    return kExitOk;
}

inline int do_eval(const Command& cmd, EvalParams p, std::ostream& out) {
    if (!p.scene.empty()) {
        // A synth directory supplies ground truth, region masks and the stereo pair.
        if (p.gt.empty()) p.gt = join_path(p.scene, "disp_left.pfm");
        if (p.occ.empty()) p.occ = join_path(p.scene, "occ_r.png");
        if (p.oof.empty()) p.oof = join_path(p.scene, "oof_r.png");
        if (p.left.empty()) p.left = join_path(p.scene, "l.png");
        if (p.right.empty()) p.right = join_path(p.scene, "r.png");
    }
    MetricsReport report;
    std::optional<DisparityMap> pred, gt;
    if (!p.pred.empty() || !p.gt.empty()) {
        if (p.pred.empty() || p.gt.empty()) throw InvalidArgument("eval: --pred and --gt go together");
        pred = load_disp(p.pred);
        gt = load_disp(p.gt);
        std::optional<RegionMasks> masks;
        if (!p.occ.empty() || !p.oof.empty()) {
            if (p.occ.empty() || p.oof.empty()) throw InvalidArgument("eval: --occ and --oof go together");
            masks = RegionMasks{load_mask(p.occ), load_mask(p.oof)};
            require(masks->occ.same_shape(gt->width, gt->height) && masks->oof.same_shape(gt->width, gt->height),
                    "eval: mask dimension mismatch");
        }
        report.regions = disparity_metrics(*pred, *gt, masks ? &*masks : nullptr, p.outlier_px);
        if (p.focal_baseline > 0.0) {
            const auto [dp, vp] = disparity_to_depth(*pred, p.focal_baseline);
            const auto [dg, vg] = disparity_to_depth(*gt, p.focal_baseline);
            Mask both(vg.width, vg.height, 0);
            for (std::size_t i = 0; i < both.size(); ++i) both.data[i] = vp.data[i] && vg.data[i];
            report.depth = depth_metrics(dp, dg, both);
        }
    }
    if (!p.image_a.empty() || !p.image_b.empty()) {
        if (p.image_a.empty() || p.image_b.empty()) throw InvalidArgument("eval: --image-a and --image-b go together");
        const Image a = load_image(p.image_a), b = load_image(p.image_b);
        report.psnr = psnr(a, b);
        report.ssim = ssim(a, b);
    }
    if (!p.left.empty() && !p.right.empty() && gt) {
        const Image l = load_image(p.left), r = load_image(p.right);
        report.warp_error = warp_error(l, r, *gt);
        if (!p.left_b.empty() && !p.right_b.empty())
            report.fusion_ssim = fusion_ssim({l, r}, {load_image(p.left_b), load_image(p.right_b)}, *gt);
    }
    const std::string text = format_report(report);
    if (text.empty()) throw InvalidArgument("eval: nothing to evaluate (give --pred/--gt, --scene or --image-a/--image-b)");
    prepare_out_dir(p.out);
    write_file_atomic(join_path(p.out, "report.txt"), text);
    if (pred && gt) store_image(join_path(p.out, "error.png"), disparity_error_image(*pred, *gt, p.max_error));
    finish(cmd, p.out);
    out << text;
    return kExitOk;
}

/// Byte-level comparison of two directory trees.
inline bool same_tree(const fs::path& a, const fs::path& b) {
    std::vector<std::string> na, nb;
    for (const auto& e : fs::recursive_directory_iterator(a)) na.push_back(fs::relative(e.path(), a).string());
    for (const auto& e : fs::recursive_directory_iterator(b)) nb.push_back(fs::relative(e.path(), b).string());
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    if (na != nb) return false;
    for (const auto& n : na)
        if (fs::is_regular_file(a / n) && read_text((a / n).string()) != read_text((b / n).string())) return false;
    return true;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

namespace detail {

/// Runs synth, match and eval twice each into separate directories and compares the trees. Both
/// match and eval runs read the first run's inputs, since run_config.txt records input paths.
inline CheckResult cli_determinism(const fs::path& work) {
    CheckResult r{"cli.determinism", false, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream sink;
    bool ok = true;
    const std::string scene = (work / "a" / "scene").string(), pred = (work / "a" / "match" / "disparity.pfm").string();
    for (const char* tag : {"a", "b"}) {
        const std::string base = (work / tag).string();
        const std::vector<std::vector<std::string>> steps = {
            {"synth", "--seed", "7", "--width", "96", "--height", "48", "--out", base + "/scene"},
            {"match", "--views", scene, "--mode", "sgm", "--use", "r,ll,rr", "--d-max", "24", "--out", base + "/match"},
            {"eval", "--pred", pred, "--scene", scene, "--out", base + "/eval"}};
        for (const auto& s : steps) ok = ok && run(s, sink, sink) == kExitOk;
    }
    ok = ok && same_tree(work / "a", work / "b");
    r.passed = ok;
    r.detail = ok ? "synth, match and eval re-runs are byte-identical" : "re-run artifacts differ or a step failed";
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline int do_validate(const ValidateParams& p, std::ostream& out) {
    ValidationOptions opts;
    opts.seed = p.seed;
    opts.suite_scenes = p.scenes;
    opts.oracle_scenes = p.oracle_scenes;
    opts.monotonicity_trials = p.trials;
    fs::path work = p.work_dir;
    const bool own = work.empty();
    if (own) work = validate_detail::make_temp_dir();
    opts.work_dir = work / "io";
    auto results = run_validation(opts);
    results.push_back(cli_determinism(work / "cli"));
    if (own) {
        std::error_code ec;
        fs::remove_all(work, ec);
    }
    int failed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        failed += r.passed ? 0 : 1;
    }
    out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
    return failed ? kExitValidation : kExitOk;
}

}  // namespace detail

/// Parses and executes one command. Returns the process exit status.
inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    using namespace detail;
    CLI::App app{"Multi-baseline stereo toolkit: synthetic scenes, warping, masks, losses, matching and evaluation",
                 "mbstereo"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    const auto make = [&app](const char* name, const char* help) {
        Command c{app.add_subcommand(name, help), {}};
        c.app->add_option("--config", "Plain-text `key = value` file; flags override its entries");
        return c;
    };

    SynthParams sp;
    Command synth = make("synth", "Generate a synthetic five-view scene directory");
    synth.add("seed", sp.seed, "Scene seed");
    synth.add("width", sp.width, "Image width");
    synth.add("height", sp.height, "Image height");
    synth.flag("fractional", sp.fractional, "Real-valued disparities with bilinear rendering");
    synth.app->add_option("--out", sp.out, "Output directory")->required();

    WarpParams wp;
    Command warp = make("warp", "Warp a source image to the left view under a disparity map");
    warp.add("source", wp.source, "Source image")->required();
    warp.add("disparity", wp.disparity, "Left disparity (.pfm or KITTI .png)")->required();
    warp.add("scale", wp.scale, "Disparity scale of the source view");
    warp.add("view", wp.view, "Canonical view label (ll, c, r, rr); overrides --scale");
    warp.app->add_option("--out", wp.out, "Output directory")->required();

    MasksParams mp;
    Command masks = make("masks", "Occlusion and out-of-frame masks from left-right consistency");
    masks.add("disp-left", mp.disp_left, "Left disparity")->required();
    masks.add("disp-view", mp.disp_view, "Disparity of the other view")->required();
    masks.add("scale", mp.scale, "Disparity scale of the other view");
    masks.add("view", mp.view, "Canonical view label; overrides --scale");
    masks.add("threshold", mp.threshold, "Consistency threshold in pixels");
    masks.app->add_option("--out", mp.out, "Output directory")->required();

    LossMapParams lp;
    Command loss = make("loss-map", "Per-pixel minimum warping loss heat map and chosen-view labels");
    loss.add("views", lp.views, "Scene directory with l.png and source images")->required();
    loss.add("disparity", lp.disparity, "Left disparity")->required();
    loss.add("use", lp.use, "Source views, e.g. r,ll,rr,c or name:scale");
    loss.add("alpha", lp.alpha, "SSIM weight");
    loss.add("max-loss", lp.max_loss, "Loss mapped to the top of the heat scale");
    loss.app->add_option("--out", lp.out, "Output directory")->required();

    MatchParams xp;
    Command match = make("match", "Estimate left disparity from a scene directory");
    match.add("views", xp.views, "Scene directory with l.png and source images")->required();
    match.add("mode", xp.mode, "photo or sgm")->check(CLI::IsMember({"photo", "sgm"}));
    match.add("use", xp.use, "Source views, e.g. r,ll,rr,c or name:scale");
    match.add("d-max", xp.d_max, "Number of integer disparity candidates");
    match.add("alpha", xp.alpha, "photo: SSIM weight");
    match.add("window", xp.window, "photo: aggregation window");
    match.add("census-window", xp.sgm.census_window, "sgm: census window (3, 5 or 7)");
    match.add("p1", xp.sgm.p1, "sgm: small transition penalty");
    match.add("p2", xp.sgm.p2, "sgm: large transition penalty");
    match.add("paths", xp.sgm.paths, "sgm: aggregation paths (4 or 8)");
    match.add("lr-threshold", xp.sgm.lr_threshold, "sgm: left-right consistency threshold");
    match.flag("lr-check", xp.sgm.lr_check, "sgm: invalidate inconsistent pixels (--lr-check=false disables)");
    match.app->add_option("--out", xp.out, "Output directory")->required();

    EvalParams ep;
    Command eval = make("eval", "Disparity, image and stereo metrics");
    eval.add("pred", ep.pred, "Predicted disparity");
    eval.add("gt", ep.gt, "Ground-truth disparity");
    eval.add("scene", ep.scene, "synth directory: supplies gt, r masks and the l/r pair");
    eval.add("occ", ep.occ, "Occlusion mask PNG");
    eval.add("oof", ep.oof, "Out-of-frame mask PNG");
    eval.add("outlier-px", ep.outlier_px, "Outlier threshold in pixels");
    eval.add("focal-baseline", ep.focal_baseline, "focal*baseline for depth metrics (0 disables)");
    eval.add("image-a", ep.image_a, "First image for PSNR/SSIM");
    eval.add("image-b", ep.image_b, "Second image for PSNR/SSIM");
    eval.add("left", ep.left, "Left image for warp error");
    eval.add("right", ep.right, "Right image for warp error");
    eval.add("left-b", ep.left_b, "Left image of the second pair for fusion SSIM");
    eval.add("right-b", ep.right_b, "Right image of the second pair for fusion SSIM");
    eval.add("max-error", ep.max_error, "Error mapped to the top of the heat scale");
    eval.app->add_option("--out", ep.out, "Output directory")->required();

    ValidateParams vp;
    Command validate = make("validate", "Run the property suite on generated scenes");
    validate.add("seed", vp.seed, "First suite seed");
    validate.add("scenes", vp.scenes, "Suite size");
    validate.add("oracle-scenes", vp.oracle_scenes, "Scenes for the naive-oracle comparison");
    validate.add("trials", vp.trials, "Random trials for min-monotonicity");
    validate.add("work-dir", vp.work_dir, "Scratch directory (temporary when empty)");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*synth.app) return do_synth(synth, sp, out);
        if (*warp.app) return do_warp(warp, wp, out);
        if (*masks.app) return do_masks(masks, mp, out);
        if (*loss.app) return do_loss_map(loss, lp, out);
        if (*match.app) return do_match(match, xp, out);
        if (*eval.app) return do_eval(eval, ep, out);
        if (*validate.app) return do_validate(vp, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace mbstereo::cli

#endif
