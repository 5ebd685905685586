#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "../support/synthetic.hpp"
#include "commands.hpp"
#include "unmix/image_io.hpp"

using namespace unmix;
using namespace unmix::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "unmix_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const MixtureOperator kAnaglyph{MixtureKind::Anaglyph};

void write_quick_config(const fs::path& path) {
    std::ofstream out(path);
    out << "levels = 1\nd_max = 6\niters_per_level = 12\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("compose writes a mixture whose red plane is the left red plane") {
    fs::path dir = fresh_dir("compose");
    auto scene = testing::make_shifted_scene(1, 32, 20, 3);
    save_image(scene.left, (dir / "left.png").string());
    save_image(scene.right, (dir / "right.png").string());

    ComposeArgs args;
    args.left_path = (dir / "left.png").string();
    args.right_path = (dir / "right.png").string();
    args.out_path = (dir / "mix.png").string();
    args.op = kAnaglyph;
    CHECK(cmd_compose(args) == 0);

    PlanarImage left = load_image(args.left_path);
    PlanarImage mix = load_image(args.out_path);
    for (std::size_t i = 0; i < mix.plane(0).size(); ++i)
        CHECK(mix.plane(0)[i] == left.plane(0)[i]);

    json report = json::parse(std::ifstream(dir / "mix_report.json"));
    CHECK(report["command"] == "compose");
    CHECK(report["checksums"].contains("mixture"));
}

TEST_CASE("unmix produces the documented artifacts and a valid report") {
    fs::path dir = fresh_dir("unmix");
    auto scene = testing::make_shifted_scene(2, 48, 32, 3);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    save_image(mix, (dir / "mix.png").string());
    write_quick_config(dir / "cfg.txt");

    UnmixArgs args;
    args.mixture_path = (dir / "mix.png").string();
    args.config_path = (dir / "cfg.txt").string();
    args.out_dir = (dir / "out").string();
    args.op = kAnaglyph;
    CHECK(cmd_unmix(args) == 0);

    for (const char* f : {"left.png", "right.png", "d_left.pfm", "d_right.pfm",
                          "d_left.png", "d_right.png", "trace.csv", "report.json",
                          "left_colorized.png", "right_colorized.png"})
        CHECK(fs::exists(dir / "out" / f));

    json report = json::parse(std::ifstream(dir / "out" / "report.json"));
    CHECK(report["schema_version"] == "1.0");
    CHECK(report["operator"] == "anaglyph");
    CHECK(report["config"]["levels"] == 1);
    CHECK(report["metrics"].contains("loss_final"));
    CHECK(report["diagnostics"]["ill_posed"] == false);
}

TEST_CASE("unmix on a constant mixture warns about ill-posed input") {
    fs::path dir = fresh_dir("illposed");
    PlanarImage mix(32, 24, 3, 0.5);
    save_image(mix, (dir / "mix.png").string());
    write_quick_config(dir / "cfg.txt");

    UnmixArgs args;
    args.mixture_path = (dir / "mix.png").string();
    args.config_path = (dir / "cfg.txt").string();
    args.out_dir = (dir / "out").string();
    args.op = MixtureOperator{MixtureKind::DoubleVision};
    CHECK(cmd_unmix(args) == 0);

    json report = json::parse(std::ifstream(dir / "out" / "report.json"));
    REQUIRE(report["warnings"].size() > 0);
    std::string w = report["warnings"][0];
    CHECK(w.find("ill-posed") != std::string::npos);
}

TEST_CASE("unmix --ablate-separation-only reports zero stereo components") {
    fs::path dir = fresh_dir("ablate");
    auto scene = testing::make_shifted_scene(3, 48, 32, 3);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    save_image(mix, (dir / "mix.png").string());
    write_quick_config(dir / "cfg.txt");

    UnmixArgs args;
    args.mixture_path = (dir / "mix.png").string();
    args.config_path = (dir / "cfg.txt").string();
    args.out_dir = (dir / "out").string();
    args.op = kAnaglyph;
    args.ablate_separation_only = true;
    CHECK(cmd_unmix(args) == 0);

    json report = json::parse(std::ifstream(dir / "out" / "report.json"));
    CHECK(report["metrics"]["loss_breakdown"]["warp_left"] == 0.0);
    CHECK(report["metrics"]["loss_breakdown"]["warp_right"] == 0.0);
    CHECK(report["metrics"]["loss_breakdown"]["smooth_left"] == 0.0);
    CHECK(report["metrics"]["loss_breakdown"]["smooth_right"] == 0.0);
}

TEST_CASE("evaluate: identical directories give zero errors and capped PSNR") {
    fs::path pred = fresh_dir("eval_pred");
    fs::path gt = fresh_dir("eval_gt");
    fs::path pred_d = fresh_dir("eval_pred_disp");
    fs::path gt_d = fresh_dir("eval_gt_disp");
    auto scene = testing::make_shifted_scene(4, 32, 20, 2);
    save_image(scene.left, (pred / "a_left.png").string());
    save_image(scene.left, (gt / "a_left.png").string());
    save_pfm(scene.d_left, (pred_d / "a.pfm").string());
    save_pfm(scene.d_left, (gt_d / "a.pfm").string());

    EvaluateArgs sep;
    sep.pred_dir = pred.string();
    sep.gt_dir = gt.string();
    sep.kind = "separation";
    sep.out_path = (pred / "sep.json").string();
    CHECK(cmd_evaluate(sep) == 0);
    json s = json::parse(std::ifstream(pred / "sep.json"));
    CHECK(s["metrics"]["psnr_mean"] == 99.0);
    CHECK(s["metrics"]["psnr_left"] == 99.0);

    EvaluateArgs disp;
    disp.pred_dir = pred_d.string();
    disp.gt_dir = gt_d.string();
    disp.kind = "disparity";
    disp.out_path = (pred_d / "disp.json").string();
    CHECK(cmd_evaluate(disp) == 0);
    json d = json::parse(std::ifstream(pred_d / "disp.json"));
    CHECK(d["metrics"]["bad1"] == 0.0);
    CHECK(d["metrics"]["d1_all"] == 0.0);
}

TEST_CASE("evaluate: uniform 2 px offset fails the 1 px threshold everywhere") {
    fs::path pred = fresh_dir("eval2_pred");
    fs::path gt = fresh_dir("eval2_gt");
    DisparityMap truth(16, 10, 4.0);
    DisparityMap off = truth;
    for (double& v : off.values) v += 2.0;
    save_pfm(off, (pred / "m.pfm").string());
    save_pfm(truth, (gt / "m.pfm").string());

    EvaluateArgs disp;
    disp.pred_dir = pred.string();
    disp.gt_dir = gt.string();
    disp.kind = "disparity";
    disp.out_path = (pred / "disp.json").string();
    CHECK(cmd_evaluate(disp) == 0);
    json d = json::parse(std::ifstream(pred / "disp.json"));
    CHECK(d["metrics"]["bad1"] == 1.0);
    CHECK(d["metrics"]["bad3"] == 0.0);
}

TEST_CASE("evaluate: depth kind reproduces the closed-form ratio cases") {
    fs::path pred = fresh_dir("evald_pred");
    fs::path gt = fresh_dir("evald_gt");
    DepthMap g(8, 6, 5.0), p(8, 6, 6.0);
    save_pfm(p, (pred / "z.pfm").string());
    save_pfm(g, (gt / "z.pfm").string());

    EvaluateArgs depth;
    depth.pred_dir = pred.string();
    depth.gt_dir = gt.string();
    depth.kind = "depth";
    depth.out_path = (pred / "depth.json").string();
    CHECK(cmd_evaluate(depth) == 0);
    json d = json::parse(std::ifstream(pred / "depth.json"));
    CHECK(d["metrics"]["abs_rel"] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(d["metrics"]["delta1"] == 1.0);
}

TEST_CASE("evaluate: empty intersection is an error") {
    fs::path pred = fresh_dir("evale_pred");
    fs::path gt = fresh_dir("evale_gt");
    EvaluateArgs args;
    args.pred_dir = pred.string();
    args.gt_dir = gt.string();
    args.kind = "separation";
    CHECK_THROWS(cmd_evaluate(args));
}

TEST_CASE("bench: empty directory raises 'no pairs found'") {
    fs::path dir = fresh_dir("bench_empty");
    BenchArgs args;
    args.data_dir = dir.string();
    args.out_dir = (dir / "out").string();
    args.op = kAnaglyph;
    CHECK_THROWS_WITH_AS(cmd_bench(args), doctest::Contains("no pairs found"),
                         std::runtime_error);
}

TEST_CASE("bench: reruns are identical up to timing") {
    fs::path dir = fresh_dir("bench_det");
    auto scene = testing::make_shifted_scene(55, 48, 32, 3);
    save_image(scene.left, (dir / "s_left.png").string());
    save_image(scene.right, (dir / "s_right.png").string());
    write_quick_config(dir / "cfg.txt");

    BenchArgs args;
    args.data_dir = dir.string();
    args.config_path = (dir / "cfg.txt").string();
    args.op = kAnaglyph;
    args.out_dir = (dir / "run1").string();
    REQUIRE(cmd_bench(args) == 0);
    args.out_dir = (dir / "run2").string();
    REQUIRE(cmd_bench(args) == 0);

    auto strip_timing = [](json& j) {
        j.erase("timing_s");
        for (auto& item : j["items"]) item.erase("timing_s");
    };
    json a = json::parse(std::ifstream(dir / "run1" / "report.json"));
    json b = json::parse(std::ifstream(dir / "run2" / "report.json"));
    strip_timing(a);
    strip_timing(b);
    CHECK(a == b);
}

TEST_CASE("bench: a broken scene is reported per item and fails the exit code") {
    fs::path dir = fresh_dir("bench_partial");
    auto scene = testing::make_shifted_scene(60, 48, 32, 3);
    save_image(scene.left, (dir / "good_left.png").string());
    save_image(scene.right, (dir / "good_right.png").string());
    save_image(scene.left, (dir / "broken_left.png").string());  // right view missing
    write_quick_config(dir / "cfg.txt");

    BenchArgs args;
    args.data_dir = dir.string();
    args.config_path = (dir / "cfg.txt").string();
    args.out_dir = (dir / "out").string();
    args.op = kAnaglyph;
    CHECK(cmd_bench(args) == 1);

    json report = json::parse(std::ifstream(dir / "out" / "report.json"));
    CHECK(report["status"] == "partial-failure");
    int ok = 0, failed = 0;
    for (const auto& item : report["items"]) {
        if (item["status"] == "ok") ++ok;
        else ++failed;
    }
    CHECK(ok == 1);
    CHECK(failed == 1);
}

TEST_CASE("bench: runs a two-scene suite and emits the comparison metrics") {
    fs::path dir = fresh_dir("bench_two");
    for (int s = 0; s < 2; ++s) {
        auto scene = testing::make_shifted_scene(40 + s, 48, 32, 3);
        std::string base = "scene" + std::to_string(s);
        save_image(scene.left, (dir / (base + "_left.png")).string());
        save_image(scene.right, (dir / (base + "_right.png")).string());
        save_pfm(scene.d_left, (dir / (base + "_disp_left.pfm")).string());
    }
    write_quick_config(dir / "cfg.txt");

    BenchArgs args;
    args.data_dir = dir.string();
    args.config_path = (dir / "cfg.txt").string();
    args.out_dir = (dir / "out").string();
    args.op = kAnaglyph;
    CHECK(cmd_bench(args) == 0);

    json report = json::parse(std::ifstream(dir / "out" / "report.json"));
    CHECK(report["items"].size() == 2);
    CHECK(report["metrics"].contains("psnr_joint_mean"));
    CHECK(report["metrics"].contains("psnr_separation_only_mean"));
    for (const auto& item : report["items"]) {
        CHECK(item["status"] == "ok");
        CHECK(item.contains("bad1"));
    }
}

}  // TEST_SUITE
