#include "unmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unmix {

double psnr(const PlanarImage& a, const PlanarImage& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: dimension mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.sample_count(); ++i) {
        double diff = a.data()[i] - b.data()[i];
        mse += diff * diff;
    }
    mse /= static_cast<double>(a.sample_count());
    if (mse == 0.0) return 99.0;
    return std::min(10.0 * std::log10(1.0 / mse), 99.0);
}

double bad_pixel_ratio(const DisparityMap& d, const DisparityMap& gt, double tau,
                       double rel_tau) {
    if (!d.same_shape(gt)) throw std::invalid_argument("bad_pixel_ratio: dimension mismatch");
    long n = 0, bad = 0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            if (!gt.is_valid(x, y)) continue;
            ++n;
            if (!d.is_valid(x, y)) {
                ++bad;
                continue;
            }
            double err = std::abs(d.at(x, y) - gt.at(x, y));
            bool is_bad = err > tau;
            if (rel_tau > 0.0) is_bad = is_bad && err > rel_tau * gt.at(x, y);
            if (is_bad) ++bad;
        }
    }
    if (n == 0) throw std::invalid_argument("bad_pixel_ratio: no valid ground-truth pixels");
    return static_cast<double>(bad) / static_cast<double>(n);
}

DepthMap disparity_to_depth(const DisparityMap& d, double focal_px, double baseline_m) {
    if (focal_px <= 0.0 || baseline_m <= 0.0)
        throw std::invalid_argument("disparity_to_depth: calibration must be positive");
    constexpr double eps = 1e-3;
    DepthMap depth(d.width, d.height);
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            double v = d.at(x, y);
            if (!d.is_valid(x, y) || v <= eps) {
                depth.at(x, y) = 0.0;
                depth.set_valid(x, y, false);
            } else {
                depth.at(x, y) = focal_px * baseline_m / v;
                depth.set_valid(x, y, true);
            }
        }
    }
    return depth;
}

DepthMetrics eigen_depth_metrics(const DepthMap& pred, const DepthMap& gt,
                                 double min_depth, double max_depth) {
    if (!pred.same_shape(gt))
        throw std::invalid_argument("eigen_depth_metrics: dimension mismatch");
    if (!(0.0 < min_depth && min_depth < max_depth))
        throw std::invalid_argument("eigen_depth_metrics: need 0 < min_depth < max_depth");

    double abs_rel = 0, sq_rel = 0, sq = 0, sq_log = 0;
    long d1 = 0, d2 = 0, d3 = 0, n = 0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            if (!gt.is_valid(x, y) || !pred.is_valid(x, y)) continue;
            double g = std::clamp(gt.at(x, y), min_depth, max_depth);
            double p = std::clamp(pred.at(x, y), min_depth, max_depth);
            ++n;
            double diff = p - g;
            abs_rel += std::abs(diff) / g;
            sq_rel += diff * diff / g;
            sq += diff * diff;
            double dl = std::log(p) - std::log(g);
            sq_log += dl * dl;
            double ratio = std::max(p / g, g / p);
            if (ratio < 1.25) ++d1;
            if (ratio < 1.25 * 1.25) ++d2;
            if (ratio < 1.25 * 1.25 * 1.25) ++d3;
        }
    }
    if (n == 0) throw std::invalid_argument("eigen_depth_metrics: no mutually valid pixels");

    double inv_n = 1.0 / static_cast<double>(n);
    DepthMetrics m;
    m.abs_rel = abs_rel * inv_n;
    m.sq_rel = sq_rel * inv_n;
    m.rmse = std::sqrt(sq * inv_n);
    m.rmse_log = std::sqrt(sq_log * inv_n);
    m.delta1 = d1 * inv_n;
    m.delta2 = d2 * inv_n;
    m.delta3 = d3 * inv_n;
    return m;
}

}  // namespace unmix
