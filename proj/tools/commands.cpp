#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

namespace unmix::cli {
namespace fs = std::filesystem;

namespace {

class StopWatch {
public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    void restart() { start_ = std::chrono::steady_clock::now(); }

private:
    std::chrono::steady_clock::time_point start_;
};

void finish(json& report, const std::string& out_path, bool print_json) {
    if (!out_path.empty()) write_report(report, out_path);
    if (print_json) std::cout << report.dump(2) << std::endl;
}

SolverConfig load_config(const std::string& path) {
    return path.empty() ? SolverConfig{} : SolverConfig::from_file(path);
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

PlanarImage maybe_crop(const PlanarImage& img, int border) {
    return border > 0 ? crop_border(img, border) : img;
}

void scale_disparity(DisparityMap& d, double factor) {
    if (factor == 1.0) return;
    for (double& v : d.values) v *= factor;
}

}  // namespace

int cmd_compose(const ComposeArgs& args) {
    json report = make_report("compose");
    StopWatch watch;
    PlanarImage left = load_image(args.left_path);
    PlanarImage right = load_image(args.right_path);
    report["inputs"]["left"] = args.left_path;
    report["inputs"]["right"] = args.right_path;
    report["operator"] = args.op.name();
    report["timing_s"]["load"] = watch.seconds();

    watch.restart();
    PlanarImage mixture = compose(args.op, left, right);
    save_image(mixture, args.out_path);
    report["timing_s"]["compose"] = watch.seconds();
    report["artifacts"]["mixture"] = args.out_path;
    report["checksums"]["mixture"] = file_checksum(args.out_path);
    report["checksums"]["left"] = file_checksum(args.left_path);
    report["checksums"]["right"] = file_checksum(args.right_path);

    fs::path out(args.out_path);
    finish(report, (out.parent_path() / (out.stem().string() + "_report.json")).string(),
           args.print_json);
    return 0;
}

int cmd_unmix(const UnmixArgs& args) {
    json report = make_report("unmix");
    fs::create_directories(args.out_dir);
    fs::path out(args.out_dir);

    SolverConfig cfg = load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    report["inputs"]["mixture"] = args.mixture_path;
    report["operator"] = args.op.name();
    report["config"] = config_to_json(cfg);
    report["ablate_separation_only"] = args.ablate_separation_only;

    StopWatch watch;
    PlanarImage mixture = load_image(args.mixture_path);
    if (mixture.channels() != 3)
        throw std::runtime_error("unmix: mixture must be a 3-channel image");
    report["timing_s"]["load"] = watch.seconds();

    watch.restart();
    Solution sol = args.ablate_separation_only
                       ? ablate_separation_only(mixture, args.op, cfg)
                       : solve(mixture, args.op, cfg);
    report["timing_s"]["solve"] = watch.seconds();

    if (sol.diagnostics.ill_posed_warning) {
        report["warnings"].push_back("ill-posed input: mixture carries almost no signal");
        std::cerr << "warning: ill-posed input (near-constant mixture)\n";
    }
    report["diagnostics"] = {
        {"clamped_samples", sol.diagnostics.clamped_samples},
        {"max_projection_residual", sol.diagnostics.max_projection_residual},
        {"step_retries", sol.diagnostics.step_retries},
        {"ill_posed", sol.diagnostics.ill_posed_warning}};

    watch.restart();
    auto art = [&](const char* name, const fs::path& p) {
        report["artifacts"][name] = p.string();
        return p.string();
    };
    save_image(sol.left, art("left", out / "left.png"));
    save_image(sol.right, art("right", out / "right.png"));
    save_pfm(sol.d_left, art("d_left_pfm", out / "d_left.pfm"));
    save_pfm(sol.d_right, art("d_right_pfm", out / "d_right.pfm"));
    save_kitti_disparity(sol.d_left, art("d_left_png", out / "d_left.png"));
    save_kitti_disparity(sol.d_right, art("d_right_png", out / "d_right.png"));
    write_trace_csv(sol.loss_trace, art("trace", out / "trace.csv"));

    if (args.op.kind == MixtureKind::Anaglyph && !args.ablate_separation_only) {
        auto [cl, cr] = colorize_anaglyph(mixture, sol.d_left, sol.d_right, true);
        save_image(cl, art("left_colorized", out / "left_colorized.png"));
        save_image(cr, art("right_colorized", out / "right_colorized.png"));
        auto [cl_raw, cr_raw] = colorize_anaglyph(mixture, sol.d_left, sol.d_right, false);
        save_image(cl_raw, art("left_colorized_raw", out / "left_colorized_raw.png"));
        save_image(cr_raw, art("right_colorized_raw", out / "right_colorized_raw.png"));
    }
    report["timing_s"]["write"] = watch.seconds();

    const LossBreakdown& final_bd = sol.loss_trace.back().breakdown;
    const LossBreakdown& init_bd = sol.loss_trace.front().breakdown;
    report["metrics"]["loss_initial"] = init_bd.total;
    report["metrics"]["loss_final"] = final_bd.total;
    report["metrics"]["loss_breakdown"] = {
        {"content_left", final_bd.content_left},   {"content_right", final_bd.content_right},
        {"prior_left", final_bd.prior_left},       {"prior_right", final_bd.prior_right},
        {"warp_left", final_bd.warp_left},         {"warp_right", final_bd.warp_right},
        {"smooth_left", final_bd.smooth_left},     {"smooth_right", final_bd.smooth_right},
        {"total", final_bd.total}};

    finish(report, (out / "report.json").string(), args.print_json);
    return 0;
}

int cmd_colorize(const ColorizeArgs& args) {
    json report = make_report("colorize");
    fs::create_directories(args.out_dir);
    fs::path out(args.out_dir);

    StopWatch watch;
    PlanarImage mixture = load_image(args.mixture_path);
    DisparityMap dl = load_pfm(args.d_left_path);
    DisparityMap dr = load_pfm(args.d_right_path);
    report["inputs"] = {{"mixture", args.mixture_path},
                        {"d_left", args.d_left_path},
                        {"d_right", args.d_right_path}};
    report["timing_s"]["load"] = watch.seconds();

    watch.restart();
    auto [left, right] = colorize_anaglyph(mixture, dl, dr, true, args.tau);
    auto [left_raw, right_raw] = colorize_anaglyph(mixture, dl, dr, false, args.tau);
    report["timing_s"]["colorize"] = watch.seconds();

    save_image(left, (out / "left.png").string());
    save_image(right, (out / "right.png").string());
    save_image(left_raw, (out / "left_raw.png").string());
    save_image(right_raw, (out / "right_raw.png").string());
    report["artifacts"] = {{"left", (out / "left.png").string()},
                           {"right", (out / "right.png").string()},
                           {"left_raw", (out / "left_raw.png").string()},
                           {"right_raw", (out / "right_raw.png").string()}};

    finish(report, (out / "report.json").string(), args.print_json);
    return 0;
}

int cmd_oracle(const OracleArgs& args) {
    json report = make_report("oracle");
    fs::create_directories(args.out_dir);
    fs::path out(args.out_dir);

    StopWatch watch;
    PlanarImage left = load_image(args.left_path);
    PlanarImage right = load_image(args.right_path);
    report["inputs"] = {{"left", args.left_path}, {"right", args.right_path}};
    report["d_max"] = args.d_max;
    report["tau"] = args.tau;
    report["timing_s"]["load"] = watch.seconds();

    watch.restart();
    LossWeights w;
    DisparityMap dl = wta_disparity(build_cost_volume(left, right, args.d_max, w));
    DisparityMap dr = flip_horizontal(wta_disparity(
        build_cost_volume(flip_horizontal(right), flip_horizontal(left), args.d_max, w)));
    auto occluded = lr_consistency(dl, dr, args.tau);
    DisparityMap dl_filled = fill_occlusions(dl, occluded);
    report["timing_s"]["match"] = watch.seconds();

    long n_occ = 0;
    for (auto v : occluded) n_occ += v;
    report["metrics"]["occluded_fraction"] =
        static_cast<double>(n_occ) / static_cast<double>(occluded.size());

    save_pfm(dl, (out / "d_left.pfm").string());
    save_pfm(dr, (out / "d_right.pfm").string());
    save_pfm(dl_filled, (out / "d_left_filled.pfm").string());
    save_kitti_disparity(dl, (out / "d_left.png").string());
    save_kitti_disparity(dr, (out / "d_right.png").string());

    PlanarImage mask(left.width(), left.height(), 1);
    for (int y = 0; y < left.height(); ++y)
        for (int x = 0; x < left.width(); ++x)
            mask.at(x, y) = occluded[static_cast<std::size_t>(y) * left.width() + x] ? 1.0 : 0.0;
    save_image(mask, (out / "occlusion_left.png").string());

    report["artifacts"] = {{"d_left", (out / "d_left.pfm").string()},
                           {"d_right", (out / "d_right.pfm").string()},
                           {"d_left_filled", (out / "d_left_filled.pfm").string()},
                           {"occlusion_left", (out / "occlusion_left.png").string()}};
    finish(report, (out / "report.json").string(), args.print_json);
    return 0;
}

namespace {

std::vector<std::pair<std::string, std::string>> matched_files(const std::string& pred_dir,
                                                               const std::string& gt_dir,
                                                               bool disparity) {
    std::map<std::string, std::string> preds;
    for (const auto& entry : fs::directory_iterator(pred_dir)) {
        if (!entry.is_regular_file()) continue;
        fs::path p = entry.path();
        bool ok = disparity ? (p.extension() == ".pfm" || p.extension() == ".png")
                            : is_image_file(p);
        if (ok) preds[p.filename().string()] = p.string();
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, path] : preds) {
        fs::path gt = fs::path(gt_dir) / name;
        if (fs::exists(gt)) out.emplace_back(path, gt.string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

DisparityMap load_disparity_any(const std::string& path) {
    return fs::path(path).extension() == ".pfm" ? load_pfm(path) : load_kitti_disparity(path);
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args) {
    json report = make_report("evaluate");
    report["inputs"] = {{"pred", args.pred_dir}, {"gt", args.gt_dir}};
    report["kind"] = args.kind;
    report["items"] = json::array();

    bool disparity_like = args.kind == "disparity" || args.kind == "depth";
    auto files = matched_files(args.pred_dir, args.gt_dir, disparity_like);
    if (files.empty())
        throw std::runtime_error("evaluate: no matching files between " + args.pred_dir +
                                 " and " + args.gt_dir);
    StopWatch watch;

    if (args.kind == "separation") {
        double sum = 0, sum_left = 0, sum_right = 0;
        int n_left = 0, n_right = 0;
        for (const auto& [pred, gt] : files) {
            PlanarImage a = maybe_crop(load_image(pred), args.border_crop);
            PlanarImage b = maybe_crop(load_image(gt), args.border_crop);
            double v = psnr(a, b);
            sum += v;
            std::string name = fs::path(pred).filename().string();
            if (name.find("_left") != std::string::npos) {
                sum_left += v;
                ++n_left;
            } else if (name.find("_right") != std::string::npos) {
                sum_right += v;
                ++n_right;
            }
            report["items"].push_back({{"file", name}, {"psnr", v}});
        }
        report["metrics"]["psnr_mean"] = sum / files.size();
        if (n_left) report["metrics"]["psnr_left"] = sum_left / n_left;
        if (n_right) report["metrics"]["psnr_right"] = sum_right / n_right;
    } else if (args.kind == "disparity") {
        double b1 = 0, b3 = 0, d1 = 0, epe = 0;
        for (const auto& [pred, gt] : files) {
            DisparityMap dp = load_disparity_any(pred);
            DisparityMap dg = load_disparity_any(gt);
            scale_disparity(dp, args.pred_scale);
            scale_disparity(dg, args.gt_scale);
            double bad1 = bad_pixel_ratio(dp, dg, args.tau1);
            double bad3 = bad_pixel_ratio(dp, dg, args.tau3);
            double d1_all = bad_pixel_ratio(dp, dg, args.tau3,
                                            args.kitti_official ? 0.05 : 0.0);
            double err = 0;
            long n = 0;
            for (int y = 0; y < dg.height; ++y)
                for (int x = 0; x < dg.width; ++x)
                    if (dg.is_valid(x, y) && dp.is_valid(x, y)) {
                        err += std::abs(dp.at(x, y) - dg.at(x, y));
                        ++n;
                    }
            double epe_i = n ? err / n : 0.0;
            b1 += bad1;
            b3 += bad3;
            d1 += d1_all;
            epe += epe_i;
            report["items"].push_back({{"file", fs::path(pred).filename().string()},
                                       {"bad1", bad1},
                                       {"bad3", bad3},
                                       {"d1_all", d1_all},
                                       {"epe", epe_i}});
        }
        double n = static_cast<double>(files.size());
        report["metrics"]["bad1"] = b1 / n;
        report["metrics"]["bad3"] = b3 / n;
        report["metrics"]["d1_all"] = d1 / n;
        report["metrics"]["epe"] = epe / n;
    } else if (args.kind == "depth") {
        DepthMetrics acc;
        for (const auto& [pred, gt] : files) {
            DepthMap dp = load_disparity_any(pred);
            DepthMap dg = load_disparity_any(gt);
            if (args.from_disparity) {
                dp = disparity_to_depth(dp, args.focal, args.baseline);
                dg = disparity_to_depth(dg, args.focal, args.baseline);
            }
            DepthMetrics m = eigen_depth_metrics(dp, dg, args.min_depth, args.max_depth);
            acc.abs_rel += m.abs_rel;
            acc.sq_rel += m.sq_rel;
            acc.rmse += m.rmse;
            acc.rmse_log += m.rmse_log;
            acc.delta1 += m.delta1;
            acc.delta2 += m.delta2;
            acc.delta3 += m.delta3;
            report["items"].push_back({{"file", fs::path(pred).filename().string()},
                                       {"abs_rel", m.abs_rel},
                                       {"sq_rel", m.sq_rel},
                                       {"rmse", m.rmse},
                                       {"rmse_log", m.rmse_log},
                                       {"delta1", m.delta1},
                                       {"delta2", m.delta2},
                                       {"delta3", m.delta3}});
        }
        double n = static_cast<double>(files.size());
        report["metrics"] = {{"abs_rel", acc.abs_rel / n}, {"sq_rel", acc.sq_rel / n},
                             {"rmse", acc.rmse / n},       {"rmse_log", acc.rmse_log / n},
                             {"delta1", acc.delta1 / n},   {"delta2", acc.delta2 / n},
                             {"delta3", acc.delta3 / n}};
    } else {
        throw std::runtime_error("evaluate: unknown kind (use separation|disparity|depth): " +
                                 args.kind);
    }
    report["timing_s"]["evaluate"] = watch.seconds();
    finish(report, args.out_path, args.print_json);
    return 0;
}

int cmd_bench(const BenchArgs& args) {
    json report = make_report("bench");
    fs::create_directories(args.out_dir);
    fs::path out(args.out_dir);

    SolverConfig cfg = load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    report["inputs"]["data"] = args.data_dir;
    report["operator"] = args.op.name();
    report["config"] = config_to_json(cfg);
    report["items"] = json::array();

    // canonical layout: <scene>_left.png, <scene>_right.png, optional
    // <scene>_disp_left.pfm
    std::set<std::string> scenes;
    for (const auto& entry : fs::directory_iterator(args.data_dir)) {
        if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
        std::string stem = entry.path().stem().string();
        auto pos = stem.rfind("_left");
        if (pos != std::string::npos && pos == stem.size() - 5)
            scenes.insert(stem.substr(0, pos));
    }
    if (scenes.empty()) throw std::runtime_error("bench: no pairs found in " + args.data_dir);

    int failures = 0;
    double joint_psnr_sum = 0, sep_psnr_sum = 0;
    int psnr_count = 0;
    StopWatch total_watch;

    for (const std::string& scene : scenes) {
        json item;
        item["scene"] = scene;
        try {
            fs::path left_path, right_path;
            for (const char* ext : {".png", ".ppm"}) {
                fs::path l = fs::path(args.data_dir) / (scene + "_left" + ext);
                if (fs::exists(l)) {
                    left_path = l;
                    right_path = fs::path(args.data_dir) / (scene + "_right" + ext);
                }
            }
            if (left_path.empty() || !fs::exists(right_path))
                throw std::runtime_error("missing stereo pair for scene " + scene);

            PlanarImage left = load_image(left_path.string());
            PlanarImage right = load_image(right_path.string());
            PlanarImage mixture = compose(args.op, left, right);
            fs::path scene_dir = out / scene;
            fs::create_directories(scene_dir);
            save_image(mixture, (scene_dir / "mixture.png").string());

            StopWatch watch;
            Solution joint = solve(mixture, args.op, cfg);
            item["timing_s"]["joint"] = watch.seconds();
            watch.restart();
            Solution sep = ablate_separation_only(mixture, args.op, cfg);
            item["timing_s"]["separation_only"] = watch.seconds();

            PlanarImage joint_left = joint.left, joint_right = joint.right;
            if (args.op.kind == MixtureKind::Anaglyph) {
                auto [cl, cr] = colorize_anaglyph(mixture, joint.d_left, joint.d_right, true);
                auto [cl_raw, cr_raw] =
                    colorize_anaglyph(mixture, joint.d_left, joint.d_right, false);
                item["psnr_left_colorized"] = psnr(cl, left);
                item["psnr_right_colorized"] = psnr(cr, right);
                item["psnr_left_colorized_raw"] = psnr(cl_raw, left);
                item["psnr_right_colorized_raw"] = psnr(cr_raw, right);
                save_image(cl, (scene_dir / "left_colorized.png").string());
                save_image(cr, (scene_dir / "right_colorized.png").string());
                joint_left = cl;
                joint_right = cr;
            }
            save_image(joint.left, (scene_dir / "left.png").string());
            save_image(joint.right, (scene_dir / "right.png").string());
            save_pfm(joint.d_left, (scene_dir / "d_left.pfm").string());
            save_pfm(joint.d_right, (scene_dir / "d_right.pfm").string());

            double joint_psnr = 0.5 * (psnr(joint_left, left) + psnr(joint_right, right));
            double sep_psnr = 0.5 * (psnr(sep.left, left) + psnr(sep.right, right));
            item["psnr_joint"] = joint_psnr;
            item["psnr_separation_only"] = sep_psnr;
            item["psnr_left"] = psnr(joint_left, left);
            item["psnr_right"] = psnr(joint_right, right);
            joint_psnr_sum += joint_psnr;
            sep_psnr_sum += sep_psnr;
            ++psnr_count;

            fs::path gt_disp = fs::path(args.data_dir) / (scene + "_disp_left.pfm");
            if (fs::exists(gt_disp)) {
                DisparityMap gt = load_pfm(gt_disp.string());
                item["bad1"] = bad_pixel_ratio(joint.d_left, gt, 1.0);
                item["bad3"] = bad_pixel_ratio(joint.d_left, gt, 3.0);
                item["d1_all"] = bad_pixel_ratio(joint.d_left, gt, 3.0);
            }
            item["status"] = "ok";
        } catch (const std::exception& e) {
            item["status"] = "error";
            item["error"] = e.what();
            ++failures;
        }
        report["items"].push_back(item);
    }

    if (psnr_count > 0) {
        report["metrics"]["psnr_joint_mean"] = joint_psnr_sum / psnr_count;
        report["metrics"]["psnr_separation_only_mean"] = sep_psnr_sum / psnr_count;
        report["metrics"]["joint_minus_separation_db"] =
            (joint_psnr_sum - sep_psnr_sum) / psnr_count;
    }
    report["metrics"]["scenes"] = scenes.size();
    report["metrics"]["failures"] = failures;
    report["timing_s"]["total"] = total_watch.seconds();
    if (failures > 0) report["status"] = "partial-failure";

    finish(report, (out / "report.json").string(), args.print_json);
    return failures == 0 ? 0 : 1;
}

}  // namespace unmix::cli
