#pragma once

#include <string>

#include "report.hpp"
#include "unmix/unmix.hpp"

namespace unmix::cli {

struct ComposeArgs {
    std::string left_path, right_path, out_path;
    MixtureOperator op;
    bool print_json = false;
};

struct UnmixArgs {
    std::string mixture_path, config_path, out_dir;
    MixtureOperator op;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool ablate_separation_only = false;
    bool print_json = false;
};

struct ColorizeArgs {
    std::string mixture_path, d_left_path, d_right_path, out_dir;
    double tau = 1.0;
    bool print_json = false;
};

struct OracleArgs {
    std::string left_path, right_path, out_dir;
    int d_max = 64;
    double tau = 1.0;
    bool print_json = false;
};

struct EvaluateArgs {
    std::string pred_dir, gt_dir, kind, out_path;
    double tau1 = 1.0, tau3 = 3.0;
    bool kitti_official = false;
    double pred_scale = 1.0, gt_scale = 1.0;
    int border_crop = 0;
    bool from_disparity = false;
    double focal = 720.0, baseline = 0.54;
    double min_depth = 1e-3, max_depth = 80.0;
    bool print_json = false;
};

struct BenchArgs {
    std::string data_dir, config_path, out_dir;
    MixtureOperator op;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool print_json = false;
};

int cmd_compose(const ComposeArgs& args);
int cmd_unmix(const UnmixArgs& args);
int cmd_colorize(const ColorizeArgs& args);
int cmd_oracle(const OracleArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_bench(const BenchArgs& args);

}  // namespace unmix::cli
