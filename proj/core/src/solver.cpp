#include "unmix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unmix/cost_volume.hpp"
#include "unmix/image_ops.hpp"

namespace unmix {

void SolverConfig::validate() const {
    weights.validate();
    if (d_max < 1.0) throw std::invalid_argument("SolverConfig: d_max must be >= 1");
    if (levels < 1) throw std::invalid_argument("SolverConfig: levels must be >= 1");
    if (iters_per_level < 1) throw std::invalid_argument("SolverConfig: iters_per_level must be >= 1");
    if (step_size <= 0.0) throw std::invalid_argument("SolverConfig: step_size must be > 0");
    if (rms_decay < 0.0 || rms_decay >= 1.0)
        throw std::invalid_argument("SolverConfig: rms_decay must be in [0, 1)");
    if (rms_epsilon <= 0.0) throw std::invalid_argument("SolverConfig: rms_epsilon must be > 0");
}

double SolverConfig::d_max_at_level(int level) const {
    return d_max * std::pow(2.0, -level);
}

SolverConfig SolverConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    SolverConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key or value");
        double v = 0.0;
        try {
            v = std::stod(value);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": not a number: " + value);
        }
        if (key == "alpha_c") cfg.weights.alpha_c = v;
        else if (key == "alpha_p") cfg.weights.alpha_p = v;
        else if (key == "omega_w") cfg.weights.omega_w = v;
        else if (key == "omega_s") cfg.weights.omega_s = v;
        else if (key == "lambda1") cfg.weights.lambda1 = v;
        else if (key == "lambda2") cfg.weights.lambda2 = v;
        else if (key == "d_max") cfg.d_max = v;
        else if (key == "levels") cfg.levels = static_cast<int>(v);
        else if (key == "iters_per_level") cfg.iters_per_level = static_cast<int>(v);
        else if (key == "step_size") cfg.step_size = v;
        else if (key == "rms_decay") cfg.rms_decay = v;
        else if (key == "rms_epsilon") cfg.rms_epsilon = v;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(v);
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown config key: " + key);
    }
    cfg.validate();
    return cfg;
}

std::pair<double, double> rmsprop_update(double x, double grad, double accum,
                                         const SolverConfig& cfg) {
    double v = cfg.rms_decay * accum + (1.0 - cfg.rms_decay) * grad * grad;
    double x_new = x - cfg.step_size * grad / std::sqrt(v + cfg.rms_epsilon);
    return {x_new, v};
}

namespace {

// Mean of the green and blue planes as a 1-channel proxy for right-view
// luminance inside an anaglyph; companion to the red plane for the left view.
PlanarImage red_plane(const PlanarImage& img) {
    PlanarImage out(img.width(), img.height(), 1, 0.0, img.range());
    std::copy(img.plane(0).begin(), img.plane(0).end(), out.plane(0).begin());
    return out;
}

PlanarImage cyan_plane(const PlanarImage& img) {
    PlanarImage out(img.width(), img.height(), 1, 0.0, img.range());
    auto g = img.plane(1);
    auto b = img.plane(2);
    auto o = out.plane(0);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.5 * (g[i] + b[i]);
    return out;
}

// Matching the mixture against itself always wins at d=0; suppressing the
// smallest offsets lets winner-take-all lock onto the ghost echo instead.
void suppress_near_zero(CostVolume& cv, int dead_below) {
    int top = std::min(dead_below, cv.num_hypotheses());
    for (int d = 0; d < top; ++d)
        for (int y = 0; y < cv.height; ++y)
            for (int x = 0; x < cv.width; ++x) cv.at(x, y, d) = cv.max_cost;
}

DisparityMap wta_from(const PlanarImage& ref, const PlanarImage& other, int d_max,
                      const LossWeights& w, int dead_below) {
    CostVolume cv = build_cost_volume(ref, other, d_max, w);
    if (dead_below > 0) suppress_near_zero(cv, dead_below);
    return wta_disparity(cv);
}

struct InitDisparities {
    DisparityMap d_left, d_right;
};

InitDisparities init_disparities(const PlanarImage& mixture, MixtureOperator op,
                                 int d_max, const LossWeights& w) {
    int iw = mixture.width(), ih = mixture.height();
    d_max = std::min(d_max, iw - 2);
    InitDisparities out;
    switch (op.kind) {
        case MixtureKind::Anaglyph: {
            // left-view content lives in the red plane, right-view in green/blue
            PlanarImage lp = red_plane(mixture);
            PlanarImage rp = cyan_plane(mixture);
            out.d_left = median3(wta_from(lp, rp, d_max, w, 0));
            out.d_right = median3(flip_horizontal(
                wta_from(flip_horizontal(rp), flip_horizontal(lp), d_max, w, 0)));
            break;
        }
        case MixtureKind::DoubleVision: {
            const int dead = 2;
            out.d_left = median3(wta_from(mixture, mixture, d_max, w, dead));
            PlanarImage flipped = flip_horizontal(mixture);
            out.d_right = median3(flip_horizontal(wta_from(flipped, flipped, d_max, w, dead)));
            break;
        }
        case MixtureKind::MonocularLeft:
        case MixtureKind::MonocularRight:
            out.d_left = DisparityMap(iw, ih, 0.0);
            out.d_right = DisparityMap(iw, ih, 0.0);
            break;
    }
    return out;
}

void clamp_disparity(DisparityMap& d, double d_max, long& clamped) {
    for (double& v : d.values) {
        double c = std::clamp(v, 0.0, d_max);
        if (c != v) ++clamped;
        v = c;
    }
    std::fill(d.valid.begin(), d.valid.end(), 1);
}

long clamp_image_counting(PlanarImage& img) {
    long clamped = 0;
    ValueRange r = img.range();
    for (double& v : img.data()) {
        double c = std::clamp(v, r.lo, r.hi);
        if (c != v) ++clamped;
        v = c;
    }
    return clamped;
}

bool all_finite(const Field& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool grads_finite(const TotalLossResult& r) {
    return std::isfinite(r.breakdown.total) && all_finite(r.grad_left) &&
           all_finite(r.grad_right) && all_finite(r.grad_d_left) && all_finite(r.grad_d_right);
}

void rmsprop_field(std::vector<double>& x, const std::vector<double>& g,
                   std::vector<double>& accum, double lr, const SolverConfig& cfg) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = cfg.rms_decay * accum[i] + (1.0 - cfg.rms_decay) * g[i] * g[i];
        accum[i] = v;
        x[i] -= lr * g[i] / std::sqrt(v + cfg.rms_epsilon);
    }
}

// update + clamp + project; pure w.r.t. the input state
LatentState apply_update(const LatentState& state, const TotalLossResult& eval,
                         const PlanarImage& mixture, MixtureOperator op,
                         const SolverConfig& cfg, double lr, long& clamped) {
    LatentState next = state;
    rmsprop_field(next.left.data(), eval.grad_left.data, next.rms_left.data, lr, cfg);
    rmsprop_field(next.right.data(), eval.grad_right.data, next.rms_right.data, lr, cfg);
    rmsprop_field(next.d_left.values, eval.grad_d_left.data, next.rms_d_left.data, lr, cfg);
    rmsprop_field(next.d_right.values, eval.grad_d_right.data, next.rms_d_right.data, lr, cfg);

    clamped += clamp_image_counting(next.left);
    clamped += clamp_image_counting(next.right);
    double bound = cfg.d_max_at_level(next.level);
    clamp_disparity(next.d_left, bound, clamped);
    clamp_disparity(next.d_right, bound, clamped);

    ProjectionResult proj = project(op, mixture, next.left, next.right);
    clamped += proj.clamped;
    next.left = std::move(proj.left);
    next.right = std::move(proj.right);
    return next;
}

TotalLossResult evaluate(const LatentState& s, const PlanarImage& mixture,
                         MixtureOperator op, const LossWeights& w) {
    return total_loss(s.left, s.right, s.d_left, s.d_right, mixture, op, w);
}

void reset_accumulators(LatentState& s) {
    s.rms_left = Field(s.left.width(), s.left.height(), s.left.channels());
    s.rms_right = Field(s.right.width(), s.right.height(), s.right.channels());
    s.rms_d_left = Field(s.d_left.width, s.d_left.height, 1);
    s.rms_d_right = Field(s.d_right.width, s.d_right.height, 1);
}

double sample_stddev(const PlanarImage& img) {
    double mean = 0.0;
    for (double v : img.data()) mean += v;
    mean /= static_cast<double>(img.sample_count());
    double var = 0.0;
    for (double v : img.data()) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(img.sample_count()));
}

}  // namespace

LatentState init_state(const PlanarImage& mixture, MixtureOperator op,
                       const SolverConfig& cfg) {
    cfg.validate();
    if (mixture.channels() != 3)
        throw std::invalid_argument("init_state: mixture must be 3-channel");
    std::vector<PlanarImage> pyr = build_pyramid(mixture, cfg.levels);
    const PlanarImage& coarse = pyr.back();

    LatentState state;
    state.level = cfg.levels - 1;
    ProjectionResult proj = project(op, coarse, coarse, coarse);
    state.left = std::move(proj.left);
    state.right = std::move(proj.right);

    int d_max_coarse = std::max(1, static_cast<int>(std::lround(cfg.d_max_at_level(state.level))));
    InitDisparities init = init_disparities(coarse, op, d_max_coarse, cfg.weights);
    state.d_left = std::move(init.d_left);
    state.d_right = std::move(init.d_right);
    long scratch = 0;
    clamp_disparity(state.d_left, cfg.d_max_at_level(state.level), scratch);
    clamp_disparity(state.d_right, cfg.d_max_at_level(state.level), scratch);

    reset_accumulators(state);
    return state;
}

std::pair<LatentState, LossBreakdown> step(const LatentState& state,
                                           const PlanarImage& mixture,
                                           MixtureOperator op, const SolverConfig& cfg) {
    cfg.validate();
    if (!mixture.same_shape(state.left))
        throw std::invalid_argument("step: mixture must match the state's level");

    TotalLossResult eval = evaluate(state, mixture, op, cfg.weights);
    if (!grads_finite(eval))
        throw std::runtime_error("step: non-finite loss or gradient at the current state");

    long clamped = 0;
    LatentState next = apply_update(state, eval, mixture, op, cfg, cfg.step_size, clamped);
    TotalLossResult post = evaluate(next, mixture, op, cfg.weights);
    if (!grads_finite(post)) {
        next = apply_update(state, eval, mixture, op, cfg, 0.5 * cfg.step_size, clamped);
        post = evaluate(next, mixture, op, cfg.weights);
        if (!grads_finite(post))
            throw std::runtime_error("step: diverged (non-finite after halved step)");
    }
    return {std::move(next), post.breakdown};
}

namespace {

Solution run_solve(const PlanarImage& mixture, MixtureOperator op, const SolverConfig& cfg) {
    cfg.validate();
    std::vector<PlanarImage> pyr = build_pyramid(mixture, cfg.levels);

    Solution sol;
    sol.diagnostics.ill_posed_warning = sample_stddev(mixture) < 1e-4;

    LatentState state = init_state(mixture, op, cfg);
    TotalLossResult eval = evaluate(state, pyr[state.level], op, cfg.weights);
    sol.loss_trace.push_back({state.level, 0, eval.breakdown});

    bool have_best = false;
    LatentState best;
    LossBreakdown best_bd;

    for (int level = cfg.levels - 1; level >= 0; --level) {
        const PlanarImage& mix_l = pyr[level];
        if (state.level != level) {
            // carry fields up one level
            state.level = level;
            PlanarImage up_left = resize_bilinear(state.left, mix_l.width(), mix_l.height());
            PlanarImage up_right = resize_bilinear(state.right, mix_l.width(), mix_l.height());
            ProjectionResult proj = project(op, mix_l, up_left, up_right);
            sol.diagnostics.clamped_samples += proj.clamped;
            state.left = std::move(proj.left);
            state.right = std::move(proj.right);
            state.d_left = resize_disparity(state.d_left, mix_l.width(), mix_l.height());
            state.d_right = resize_disparity(state.d_right, mix_l.width(), mix_l.height());
            clamp_disparity(state.d_left, cfg.d_max_at_level(level), sol.diagnostics.clamped_samples);
            clamp_disparity(state.d_right, cfg.d_max_at_level(level), sol.diagnostics.clamped_samples);
            reset_accumulators(state);
            eval = evaluate(state, mix_l, op, cfg.weights);
            sol.loss_trace.push_back({level, 0, eval.breakdown});
        }
        if (level == 0 && !have_best) {
            best = state;
            best_bd = eval.breakdown;
            have_best = true;
        }

        for (int iter = 1; iter <= cfg.iters_per_level; ++iter) {
            if (!grads_finite(eval))
                throw std::runtime_error("solve: non-finite loss or gradient");
            LatentState next =
                apply_update(state, eval, mix_l, op, cfg, cfg.step_size,
                             sol.diagnostics.clamped_samples);
            TotalLossResult next_eval = evaluate(next, mix_l, op, cfg.weights);
            if (!grads_finite(next_eval)) {
                ++sol.diagnostics.step_retries;
                next = apply_update(state, eval, mix_l, op, cfg, 0.5 * cfg.step_size,
                                    sol.diagnostics.clamped_samples);
                next_eval = evaluate(next, mix_l, op, cfg.weights);
                if (!grads_finite(next_eval))
                    throw std::runtime_error("solve: diverged (non-finite after halved step)");
            }
            state = std::move(next);
            eval = std::move(next_eval);
            sol.loss_trace.push_back({level, iter, eval.breakdown});
            if (level == 0 && eval.breakdown.total < best_bd.total) {
                best = state;
                best_bd = eval.breakdown;
            }
            double residual = constraint_residual(op, mix_l, state.left, state.right);
            sol.diagnostics.max_projection_residual =
                std::max(sol.diagnostics.max_projection_residual, residual);
        }
    }

    sol.left = std::move(best.left);
    sol.right = std::move(best.right);
    sol.d_left = std::move(best.d_left);
    sol.d_right = std::move(best.d_right);
    sol.loss_trace.push_back({0, cfg.iters_per_level + 1, best_bd});
    return sol;
}

}  // namespace

Solution solve(const PlanarImage& mixture, MixtureOperator op, const SolverConfig& cfg) {
    return run_solve(mixture, op, cfg);
}

Solution ablate_separation_only(const PlanarImage& mixture, MixtureOperator op,
                                const SolverConfig& cfg) {
    SolverConfig ablated = cfg;
    ablated.weights.omega_w = 0.0;
    ablated.weights.omega_s = 0.0;
    return run_solve(mixture, op, ablated);
}

}  // namespace unmix
