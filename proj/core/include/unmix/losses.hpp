#pragma once

#include "unmix/image.hpp"
#include "unmix/mixture.hpp"

namespace unmix {

/// Loss term weights. Defaults: alpha_c=1, alpha_p=0.2, omega_w=1,
/// omega_s=0.05, lambda1=0.85, lambda2=0.15.
struct LossWeights {
    double alpha_c = 1.0;
    double alpha_p = 0.2;
    double omega_w = 1.0;
    double omega_s = 0.05;
    double lambda1 = 0.85;
    double lambda2 = 0.15;

    /// Throws unless all weights are >= 0 and lambda1 + lambda2 == 1 (1e-9).
    void validate() const;
};

struct LossBreakdown {
    double content_left = 0.0, content_right = 0.0;
    double prior_left = 0.0, prior_right = 0.0;
    double warp_left = 0.0, warp_right = 0.0;
    double smooth_left = 0.0, smooth_right = 0.0;
    double total = 0.0;

    double weighted_sum(const LossWeights& w) const {
        return w.alpha_c * (content_left + content_right) +
               w.alpha_p * (prior_left + prior_right) +
               w.omega_w * (warp_left + warp_right) +
               w.omega_s * (smooth_left + smooth_right);
    }
};

struct ValueGrad {
    double value = 0.0;
    Field grad;
};

/// Mean absolute difference; subgradient sign(pred-target)/N with sign(0)=0.
ValueGrad content_loss(const PlanarImage& pred, const PlanarImage& target);

/// Total-variation prior: mean over samples of |grad_u| + |grad_v|.
ValueGrad tv_prior(const PlanarImage& pred);

/// Per-pixel, per-channel SSIM with a 3x3 uniform window, C1 = 0.01^2,
/// C2 = 0.03^2, reflected (mirror-101) border padding. Values in (-1, 1].
PlanarImage ssim_map(const PlanarImage& a, const PlanarImage& b);

/// Chain-rule companion of ssim_map: d(sum_p upstream_p * SSIM_p)/d(a).
Field ssim_backward(const PlanarImage& a, const PlanarImage& b, const Field& upstream);

/// Appearance loss: mean of lambda1*(1-SSIM)/2 + lambda2*|difference| over
/// pixels, channels averaged. Gradient is w.r.t. the reconstructed image.
ValueGrad appearance_loss(const PlanarImage& observed, const PlanarImage& reconstructed,
                          const LossWeights& w);

struct AppearanceGrads {
    double value = 0.0;
    Field grad_reconstructed;
    Field grad_observed;
};
AppearanceGrads appearance_loss_full(const PlanarImage& observed,
                                     const PlanarImage& reconstructed,
                                     const LossWeights& w);

/// Edge-aware disparity smoothness: mean of |grad d| * exp(-|grad I|) with the
/// image gradient magnitude averaged over channels. Gradient is w.r.t. d.
ValueGrad smoothness_loss(const DisparityMap& d, const PlanarImage& img);

struct SmoothnessGrads {
    double value = 0.0;
    Field grad_disparity;
    Field grad_image;  // chain through the exp(-|grad I|) edge weights
};
SmoothnessGrads smoothness_loss_full(const DisparityMap& d, const PlanarImage& img);

struct TotalLossResult {
    LossBreakdown breakdown;
    Field grad_left, grad_right;      // W x H x 3
    Field grad_d_left, grad_d_right;  // W x H
};

/// Full objective over the latent fields: content on the mixture-pinned
/// channels, TV prior on both images, bidirectional warp appearance terms
/// chained through the sampling adjoint, and edge-aware smoothness.
TotalLossResult total_loss(const PlanarImage& left, const PlanarImage& right,
                           const DisparityMap& d_left, const DisparityMap& d_right,
                           const PlanarImage& mixture, MixtureOperator op,
                           const LossWeights& w);

}  // namespace unmix
