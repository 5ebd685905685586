#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "unmix/image.hpp"
#include "unmix/losses.hpp"
#include "unmix/mixture.hpp"

namespace unmix {

struct SolverConfig {
    LossWeights weights;
    double d_max = 96.0;      // disparity bound at the finest level, pixels
    int levels = 3;           // pyramid depth
    int iters_per_level = 300;
    double step_size = 0.05;  // RMSProp learning rate for pixel fields
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;
    std::uint64_t seed = 0;   // recorded for reproducibility; the solver is deterministic

    void validate() const;

    /// Reads a `key = value` file (# comments); keys mirror the field names
    /// plus the LossWeights fields. Unknown keys are an error.
    static SolverConfig from_file(const std::string& path);

    double d_max_at_level(int level) const;
};

/// The optimization variables: latent views and disparity fields, plus the
/// per-field RMSProp accumulators that belong to the running optimization.
struct LatentState {
    PlanarImage left, right;
    DisparityMap d_left, d_right;
    int level = 0;
    Field rms_left, rms_right, rms_d_left, rms_d_right;
};

struct TraceEntry {
    int level = 0;
    int iter = 0;
    LossBreakdown breakdown;
};

struct SolveDiagnostics {
    long clamped_samples = 0;        // range clamps across all steps + projections
    double max_projection_residual = 0.0;
    bool ill_posed_warning = false;  // mixture carries (almost) no signal
    int step_retries = 0;
};

struct Solution {
    PlanarImage left, right;
    DisparityMap d_left, d_right;
    std::vector<TraceEntry> loss_trace;  // last entry matches the returned fields
    SolveDiagnostics diagnostics;
};

/// Builds the starting point: both views replicate the mixture and are then
/// projected; disparities come from a winner-take-all cost volume at the
/// coarsest level (cross-channel matching for anaglyphs, ghost-offset
/// matching for double vision), median-filtered 3x3.
LatentState init_state(const PlanarImage& mixture, MixtureOperator op,
                       const SolverConfig& cfg);

/// One RMSProp update of every latent field, followed by range clamping and
/// hard projection onto the mixture constraint. `mixture` must live at the
/// state's pyramid level. Returns the new state and its loss breakdown.
/// A non-finite loss or gradient triggers one retry at half step size, then
/// an error.
std::pair<LatentState, LossBreakdown> step(const LatentState& state,
                                           const PlanarImage& mixture,
                                           MixtureOperator op, const SolverConfig& cfg);

/// Full coarse-to-fine joint recovery. Deterministic for identical inputs
/// and config; the returned fields are the best finest-level state seen.
Solution solve(const PlanarImage& mixture, MixtureOperator op, const SolverConfig& cfg);

/// Ablation: stereo terms disabled (omega_w = omega_s = 0), disparities stay
/// at their initialization. Used to demonstrate the joint-optimization gain.
Solution ablate_separation_only(const PlanarImage& mixture, MixtureOperator op,
                                const SolverConfig& cfg);

/// Single RMSProp update on one scalar; exposed for verification.
std::pair<double, double> rmsprop_update(double x, double grad, double accum,
                                         const SolverConfig& cfg);

}  // namespace unmix
