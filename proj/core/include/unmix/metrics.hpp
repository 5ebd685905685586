#pragma once

#include "unmix/image.hpp"

namespace unmix {

/// Scalar per-pixel map in meters; reuses the disparity container.
using DepthMap = DisparityMap;

/// Peak signal-to-noise ratio over all samples and channels with peak 1.0
/// (images in [0,1]); identical images return the declared 99.0 dB cap.
double psnr(const PlanarImage& a, const PlanarImage& b);

/// Fraction of valid-GT pixels with |d - gt| > tau. With rel_tau > 0 a pixel
/// is bad only if the error also exceeds rel_tau * gt (the official KITTI
/// D1 rule is tau=3, rel_tau=0.05). Predictions that are invalid where the
/// ground truth is valid count as bad. Throws when no GT pixel is valid.
double bad_pixel_ratio(const DisparityMap& d, const DisparityMap& gt, double tau,
                       double rel_tau = 0.0);

/// depth = focal * baseline / d; disparities <= 1e-3 px become invalid.
DepthMap disparity_to_depth(const DisparityMap& d, double focal_px, double baseline_m);

struct DepthMetrics {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
};

/// Standard monocular depth error/accuracy family over mutually valid
/// pixels, with both depths clamped into [min_depth, max_depth].
DepthMetrics eigen_depth_metrics(const DepthMap& pred, const DepthMap& gt,
                                 double min_depth = 1e-3, double max_depth = 80.0);

}  // namespace unmix
