#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace unmix::cli;

unmix::MixtureOperator parse_operator(const std::string& name) {
    auto op = unmix::MixtureOperator::parse(name);
    if (!op)
        throw CLI::ValidationError(
            "--operator", "expected one of: anaglyph, double, mono-left, mono-right");
    return *op;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unmix-stereo: recover a stereo pair and disparity maps from a "
                 "single mixture image (anaglyph, double vision, or monocular)"};
    app.require_subcommand(1);

    std::string operator_name = "anaglyph";

    ComposeArgs compose_args;
    CLI::App* compose = app.add_subcommand("compose", "Compose a mixture from a stereo pair");
    compose->add_option("--left", compose_args.left_path, "Left image")->required();
    compose->add_option("--right", compose_args.right_path, "Right image")->required();
    compose->add_option("--operator", operator_name, "Mixture operator");
    compose->add_option("--out", compose_args.out_path, "Output mixture path")->required();
    compose->add_flag("--json", compose_args.print_json, "Print the run report to stdout");

    UnmixArgs unmix_args;
    CLI::App* unmix_cmd = app.add_subcommand("unmix", "Recover stereo pair + disparities");
    unmix_cmd->add_option("--input", unmix_args.mixture_path, "Mixture image")->required();
    unmix_cmd->add_option("--operator", operator_name, "Mixture operator");
    unmix_cmd->add_option("--config", unmix_args.config_path, "Solver config file");
    auto* seed_opt = unmix_cmd->add_option("--seed", unmix_args.seed, "Config seed override");
    unmix_cmd->add_option("--out", unmix_args.out_dir, "Output directory")->required();
    unmix_cmd->add_flag("--ablate-separation-only", unmix_args.ablate_separation_only,
                        "Disable the stereo losses (ablation)");
    unmix_cmd->add_flag("--json", unmix_args.print_json, "Print the run report to stdout");

    ColorizeArgs colorize_args;
    CLI::App* colorize = app.add_subcommand("colorize", "Warp anaglyph channels into a full-colour pair");
    colorize->add_option("--input", colorize_args.mixture_path, "Anaglyph image")->required();
    colorize->add_option("--d-left", colorize_args.d_left_path, "Left disparity (PFM)")->required();
    colorize->add_option("--d-right", colorize_args.d_right_path, "Right disparity (PFM)")->required();
    colorize->add_option("--tau", colorize_args.tau, "Consistency threshold, px");
    colorize->add_option("--out", colorize_args.out_dir, "Output directory")->required();
    colorize->add_flag("--json", colorize_args.print_json, "Print the run report to stdout");

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "Brute-force cost-volume stereo matcher");
    oracle->add_option("--left", oracle_args.left_path, "Left image")->required();
    oracle->add_option("--right", oracle_args.right_path, "Right image")->required();
    oracle->add_option("--d-max", oracle_args.d_max, "Disparity search bound");
    oracle->add_option("--tau", oracle_args.tau, "Consistency threshold, px");
    oracle->add_option("--out", oracle_args.out_dir, "Output directory")->required();
    oracle->add_flag("--json", oracle_args.print_json, "Print the run report to stdout");

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Metric suites over prediction/GT directories");
    evaluate->add_option("--pred", eval_args.pred_dir, "Prediction directory")->required();
    evaluate->add_option("--gt", eval_args.gt_dir, "Ground-truth directory")->required();
    evaluate->add_option("--kind", eval_args.kind, "separation | disparity | depth")->required();
    evaluate->add_option("--out", eval_args.out_path, "Report JSON path");
    evaluate->add_option("--tau1", eval_args.tau1, "Bad-pixel threshold 1, px");
    evaluate->add_option("--tau3", eval_args.tau3, "Bad-pixel threshold 2, px");
    evaluate->add_flag("--kitti-official", eval_args.kitti_official,
                       "D1-all also requires error > 5% of GT");
    evaluate->add_option("--pred-scale", eval_args.pred_scale, "Disparity scale for predictions");
    evaluate->add_option("--gt-scale", eval_args.gt_scale, "Disparity scale for ground truth");
    evaluate->add_option("--border-crop", eval_args.border_crop, "Pixels to crop for PSNR");
    evaluate->add_flag("--from-disparity", eval_args.from_disparity,
                       "Convert disparity inputs to depth first");
    evaluate->add_option("--focal", eval_args.focal, "Focal length, px");
    evaluate->add_option("--baseline", eval_args.baseline, "Baseline, m");
    evaluate->add_option("--min-depth", eval_args.min_depth, "Depth floor, m");
    evaluate->add_option("--max-depth", eval_args.max_depth, "Depth cap, m");
    evaluate->add_flag("--json", eval_args.print_json, "Print the run report to stdout");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Compose + recover + evaluate over a dataset");
    bench->add_option("--data", bench_args.data_dir, "Dataset directory")->required();
    bench->add_option("--operator", operator_name, "Mixture operator");
    bench->add_option("--config", bench_args.config_path, "Solver config file");
    auto* bench_seed = bench->add_option("--seed", bench_args.seed, "Config seed override");
    bench->add_option("--out", bench_args.out_dir, "Output directory")->required();
    bench->add_flag("--json", bench_args.print_json, "Print the run report to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compose->parsed()) {
            compose_args.op = parse_operator(operator_name);
            return cmd_compose(compose_args);
        }
        if (unmix_cmd->parsed()) {
            unmix_args.op = parse_operator(operator_name);
            unmix_args.seed_set = seed_opt->count() > 0;
            return cmd_unmix(unmix_args);
        }
        if (colorize->parsed()) return cmd_colorize(colorize_args);
        if (oracle->parsed()) return cmd_oracle(oracle_args);
        if (evaluate->parsed()) return cmd_evaluate(eval_args);
        if (bench->parsed()) {
            bench_args.op = parse_operator(operator_name);
            bench_args.seed_set = bench_seed->count() > 0;
            return cmd_bench(bench_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
