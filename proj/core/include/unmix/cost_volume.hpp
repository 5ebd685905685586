#pragma once

#include <vector>

#include "unmix/image.hpp"
#include "unmix/losses.hpp"

namespace unmix {

/// Per-pixel matching costs for integer disparities 0..d_max. The cost is the
/// same photometric measure the solver optimizes: a 3x3-window SSIM/L1 blend
/// weighted by lambda1/lambda2. Out-of-frame hypotheses carry max_cost.
struct CostVolume {
    int width = 0;
    int height = 0;
    int d_max = 0;  // hypotheses run 0..d_max inclusive
    double max_cost = 1.0;
    std::vector<double> costs;

    double at(int x, int y, int d) const {
        return costs[(static_cast<std::size_t>(d) * height + y) * width + x];
    }
    double& at(int x, int y, int d) {
        return costs[(static_cast<std::size_t>(d) * height + y) * width + x];
    }
    int num_hypotheses() const { return d_max + 1; }
};

/// Brute-force volume: cost(x,y,d) compares the left window at x with the
/// right window at x-d. Pixels whose source column falls outside the image
/// get max_cost for that hypothesis.
CostVolume build_cost_volume(const PlanarImage& left, const PlanarImage& right,
                             int d_max, const LossWeights& w);

/// Winner-take-all argmin with ties broken toward smaller d, refined to
/// sub-pixel precision by a parabolic fit over the two neighbours (the
/// refinement never moves the estimate more than 0.5 px).
DisparityMap wta_disparity(const CostVolume& cv);

}  // namespace unmix
