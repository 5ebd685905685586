#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support/synthetic.hpp"
#include "unmix/image_ops.hpp"
#include "unmix/metrics.hpp"
#include "unmix/solver.hpp"

using namespace unmix;

namespace {

const MixtureOperator kAnaglyph{MixtureKind::Anaglyph};
const MixtureOperator kDouble{MixtureKind::DoubleVision};
const MixtureOperator kMonoLeft{MixtureKind::MonocularLeft};

SolverConfig quick_config(int iters = 30) {
    SolverConfig cfg;
    cfg.levels = 1;
    cfg.d_max = 8;
    cfg.iters_per_level = iters;
    return cfg;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation and level scaling") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.d_max == 96.0);
    CHECK(cfg.d_max_at_level(0) == 96.0);
    CHECK(cfg.d_max_at_level(2) == 24.0);
    cfg.step_size = 0.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("config file parsing: keys, comments, unknown keys") {
    auto path = std::filesystem::temp_directory_path() / "unmix_cfg_test.cfg";
    {
        std::ofstream out(path);
        out << "# solver settings\n";
        out << "alpha_p = 0.3\n";
        out << "levels = 2\n";
        out << "step_size = 0.01  # smaller steps\n";
    }
    SolverConfig cfg = SolverConfig::from_file(path.string());
    CHECK(cfg.weights.alpha_p == 0.3);
    CHECK(cfg.levels == 2);
    CHECK(cfg.step_size == 0.01);
    CHECK(cfg.weights.alpha_c == 1.0);  // untouched default

    {
        std::ofstream out(path);
        out << "alpha_q = 1\n";
    }
    CHECK_THROWS(SolverConfig::from_file(path.string()));
}

TEST_CASE("rmsprop update reproduces hand-computed iterates") {
    SolverConfig cfg;
    cfg.step_size = 0.1;
    cfg.rms_decay = 0.9;
    cfg.rms_epsilon = 1e-8;

    // f(x) = 0.5 x^2, x0 = 1, gradient = x
    double x = 1.0, v = 0.0;
    auto [x1, v1] = rmsprop_update(x, x, v, cfg);
    double v1_hand = 0.1 * 1.0;
    double x1_hand = 1.0 - 0.1 * 1.0 / std::sqrt(v1_hand + 1e-8);
    CHECK(v1 == doctest::Approx(v1_hand).epsilon(1e-15));
    CHECK(x1 == doctest::Approx(x1_hand).epsilon(1e-12));

    auto [x2, v2] = rmsprop_update(x1, x1, v1, cfg);
    double v2_hand = 0.9 * v1_hand + 0.1 * x1_hand * x1_hand;
    double x2_hand = x1_hand - 0.1 * x1_hand / std::sqrt(v2_hand + 1e-8);
    CHECK(v2 == doctest::Approx(v2_hand).epsilon(1e-12));
    CHECK(x2 == doctest::Approx(x2_hand).epsilon(1e-12));
}

TEST_CASE("init: monocular-left keeps the mixture as the left view") {
    PlanarImage mix = testing::make_texture(1, 32, 20);
    SolverConfig cfg = quick_config();
    LatentState st = init_state(mix, kMonoLeft, cfg);
    for (std::size_t i = 0; i < mix.sample_count(); ++i)
        CHECK(st.left.data()[i] == mix.data()[i]);
    for (double v : st.d_left.values) CHECK(v == 0.0);
}

TEST_CASE("init: anaglyph of a shifted texture lands near the truth") {
    auto scene = testing::make_shifted_scene(7, 96, 64, 4);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    SolverConfig cfg = quick_config();
    cfg.d_max = 12;
    LatentState st = init_state(mix, kAnaglyph, cfg);
    long good = 0, total = 0;
    for (int y = 8; y < 56; ++y)
        for (int x = 8; x < 88; ++x) {
            ++total;
            if (std::abs(st.d_left.at(x, y) - 4.0) <= 1.0) ++good;
        }
    CHECK(static_cast<double>(good) / total >= 0.8);
}

TEST_CASE("init: double vision with identical views is the degenerate fixed point") {
    PlanarImage img = testing::make_texture(9, 32, 20);
    PlanarImage mix = compose(kDouble, img, img);  // = img
    SolverConfig cfg = quick_config();
    LatentState st = init_state(mix, kDouble, cfg);
    for (std::size_t i = 0; i < mix.sample_count(); ++i) {
        CHECK(st.left.data()[i] == doctest::Approx(mix.data()[i]).epsilon(1e-12));
        CHECK(st.right.data()[i] == doctest::Approx(mix.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("step: keeps the constraint satisfied and reports a breakdown") {
    auto scene = testing::make_shifted_scene(11, 48, 32, 3);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    SolverConfig cfg = quick_config();
    cfg.d_max = 6;
    LatentState st = init_state(mix, kAnaglyph, cfg);
    auto [next, bd] = step(st, mix, kAnaglyph, cfg);
    CHECK(constraint_residual(kAnaglyph, mix, next.left, next.right) <= 1e-12);
    CHECK(bd.total == doctest::Approx(bd.weighted_sum(cfg.weights)).epsilon(1e-9));
}

TEST_CASE("step with zero weights leaves a feasible state unchanged") {
    PlanarImage img = testing::make_texture(13, 24, 16);
    PlanarImage mix = compose(kMonoLeft, img, img);
    SolverConfig cfg = quick_config();
    cfg.weights.alpha_c = 0.0;
    cfg.weights.alpha_p = 0.0;
    cfg.weights.omega_w = 0.0;
    cfg.weights.omega_s = 0.0;
    LatentState st = init_state(mix, kMonoLeft, cfg);
    auto [next, bd] = step(st, mix, kMonoLeft, cfg);
    CHECK(bd.total == 0.0);
    for (std::size_t i = 0; i < st.left.sample_count(); ++i) {
        CHECK(next.left.data()[i] == st.left.data()[i]);
        CHECK(next.right.data()[i] == st.right.data()[i]);
    }
    for (std::size_t i = 0; i < st.d_left.values.size(); ++i)
        CHECK(next.d_left.values[i] == st.d_left.values[i]);
}

TEST_CASE("solve: deterministic bit-identical reruns") {
    auto scene = testing::make_shifted_scene(17, 48, 32, 3);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    SolverConfig cfg = quick_config(20);
    cfg.d_max = 6;
    Solution a = solve(mix, kAnaglyph, cfg);
    Solution b = solve(mix, kAnaglyph, cfg);
    REQUIRE(a.loss_trace.size() == b.loss_trace.size());
    for (std::size_t i = 0; i < a.left.sample_count(); ++i) {
        CHECK(a.left.data()[i] == b.left.data()[i]);
        CHECK(a.right.data()[i] == b.right.data()[i]);
    }
    for (std::size_t i = 0; i < a.d_left.values.size(); ++i) {
        CHECK(a.d_left.values[i] == b.d_left.values[i]);
        CHECK(a.d_right.values[i] == b.d_right.values[i]);
    }
    for (std::size_t i = 0; i < a.loss_trace.size(); ++i)
        CHECK(a.loss_trace[i].breakdown.total == b.loss_trace[i].breakdown.total);
}

TEST_CASE("solve: constant mixture is flagged ill-posed, loss stays near zero") {
    PlanarImage mix(32, 24, 3, 0.5);
    SolverConfig cfg = quick_config(10);
    Solution sol = solve(mix, kDouble, cfg);
    CHECK(sol.diagnostics.ill_posed_warning);
    // textureless input: photometric terms vanish, only an init-disparity seam
    // can contribute; the trace stays flat near zero
    CHECK(sol.loss_trace.back().breakdown.total <= 0.01);
    CHECK(sol.loss_trace.back().breakdown.warp_left <= 1e-9);
    CHECK(sol.loss_trace.back().breakdown.warp_right <= 1e-9);
    for (double v : sol.d_left.values) CHECK(v <= cfg.d_max);
}

TEST_CASE("solve: single-level runs never end above their initial loss") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto scene = testing::make_shifted_scene(100 + seed, 48, 32, 3);
        PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
        SolverConfig cfg = quick_config(25);
        cfg.d_max = 6;
        Solution sol = solve(mix, kAnaglyph, cfg);
        CHECK(sol.loss_trace.back().breakdown.total <=
              sol.loss_trace.front().breakdown.total + 1e-12);
    }
}

TEST_CASE("solve: feasibility of the returned solution") {
    auto scene = testing::make_shifted_scene(31, 48, 32, 3);
    for (auto op : {kAnaglyph, kDouble, kMonoLeft}) {
        PlanarImage mix = compose(op, scene.left, scene.right);
        SolverConfig cfg = quick_config(15);
        cfg.d_max = 6;
        Solution sol = solve(mix, op, cfg);
        CHECK(constraint_residual(op, mix, sol.left, sol.right) <= 1e-9);
    }
}

TEST_CASE("coarse-to-fine: level transfer does not blow up the warp loss") {
    // the interpolation bound presumes Lipschitz images: use a smooth texture
    auto scene = testing::make_shifted_scene(37, 96, 64, 4, 3);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    SolverConfig cfg;
    cfg.levels = 2;
    cfg.d_max = 12;
    cfg.iters_per_level = 40;
    Solution sol = solve(mix, kAnaglyph, cfg);

    // find the last coarse entry and the first fine entry
    double coarse_last = -1.0, fine_first = -1.0;
    for (std::size_t i = 0; i + 1 < sol.loss_trace.size(); ++i) {
        if (sol.loss_trace[i].level == 1 && sol.loss_trace[i + 1].level == 0) {
            coarse_last = sol.loss_trace[i].breakdown.warp_left +
                          sol.loss_trace[i].breakdown.warp_right;
            fine_first = sol.loss_trace[i + 1].breakdown.warp_left +
                         sol.loss_trace[i + 1].breakdown.warp_right;
            break;
        }
    }
    REQUIRE(coarse_last >= 0.0);
    REQUIRE(fine_first >= 0.0);
    CHECK(fine_first <= 2.0 * coarse_last + 1e-3);
}

TEST_CASE("ablation: zero stereo weights never move the disparities") {
    auto scene = testing::make_shifted_scene(41, 48, 32, 3);
    PlanarImage mix = compose(kAnaglyph, scene.left, scene.right);
    SolverConfig cfg = quick_config(15);
    cfg.d_max = 6;
    LatentState init = init_state(mix, kAnaglyph, cfg);
    Solution sol = ablate_separation_only(mix, kAnaglyph, cfg);
    for (std::size_t i = 0; i < init.d_left.values.size(); ++i) {
        CHECK(sol.d_left.values[i] == init.d_left.values[i]);
        CHECK(sol.d_right.values[i] == init.d_right.values[i]);
    }
    for (const TraceEntry& e : sol.loss_trace) {
        CHECK(e.breakdown.warp_left == 0.0);
        CHECK(e.breakdown.warp_right == 0.0);
        CHECK(e.breakdown.smooth_left == 0.0);
        CHECK(e.breakdown.smooth_right == 0.0);
    }
}

TEST_CASE("solve rejects mixtures smaller than the pyramid needs") {
    PlanarImage tiny(4, 4, 3, 0.5);
    SolverConfig cfg;
    cfg.levels = 4;
    CHECK_THROWS(solve(tiny, kDouble, cfg));
}

}  // TEST_SUITE
