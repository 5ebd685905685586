#include "unmix/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unmix/image_ops.hpp"
#include "unmix/warp.hpp"

namespace unmix {

std::vector<std::uint8_t> lr_consistency(const DisparityMap& d_left,
                                         const DisparityMap& d_right, double tau) {
    if (!d_left.same_shape(d_right))
        throw std::invalid_argument("lr_consistency: dimension mismatch");
    std::vector<std::uint8_t> occluded(d_left.pixel_count(), 0);
    int w = d_left.width, h = d_left.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (!d_left.is_valid(x, y)) {
                occluded[p] = 1;
                continue;
            }
            double dl = d_left.at(x, y);
            int xr = x - static_cast<int>(std::lround(dl));
            if (xr < 0 || xr >= w || !d_right.is_valid(xr, y)) {
                occluded[p] = 1;
                continue;
            }
            if (std::abs(dl - d_right.at(xr, y)) > tau) occluded[p] = 1;
        }
    }
    return occluded;
}

DisparityMap fill_occlusions(const DisparityMap& d, const std::vector<std::uint8_t>& occluded) {
    if (occluded.size() != d.pixel_count())
        throw std::invalid_argument("fill_occlusions: mask size mismatch");
    DisparityMap out = d;
    int w = d.width, h = d.height;

    auto candidate = [&](int x, int y) {
        return !occluded[static_cast<std::size_t>(y) * w + x] && d.is_valid(x, y);
    };

    // global median over candidate pixels, for rows with no candidate at all
    std::vector<double> all;
    all.reserve(d.pixel_count());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (candidate(x, y)) all.push_back(d.at(x, y));
    double global_median = 0.0;
    if (!all.empty()) {
        std::size_t mid = (all.size() - 1) / 2;
        std::nth_element(all.begin(), all.begin() + mid, all.end());
        global_median = all[mid];
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (!occluded[p]) continue;
            bool has_l = false, has_r = false;
            double vl = 0.0, vr = 0.0;
            for (int xx = x - 1; xx >= 0; --xx)
                if (candidate(xx, y)) {
                    vl = d.at(xx, y);
                    has_l = true;
                    break;
                }
            for (int xx = x + 1; xx < w; ++xx)
                if (candidate(xx, y)) {
                    vr = d.at(xx, y);
                    has_r = true;
                    break;
                }
            double v;
            if (has_l && has_r)
                v = std::min(vl, vr);  // background preference
            else if (has_l)
                v = vl;
            else if (has_r)
                v = vr;
            else
                v = global_median;
            out.at(x, y) = v;
            out.set_valid(x, y, !all.empty());
        }
    }
    return out;
}

std::pair<PlanarImage, PlanarImage> colorize_anaglyph(const PlanarImage& mixture,
                                                      const DisparityMap& d_left,
                                                      const DisparityMap& d_right,
                                                      bool fill_occluded, double tau) {
    if (mixture.channels() != 3)
        throw std::invalid_argument("colorize_anaglyph: mixture must be 3-channel");
    if (mixture.width() != d_left.width || mixture.height() != d_left.height ||
        !d_left.same_shape(d_right))
        throw std::invalid_argument("colorize_anaglyph: dimension mismatch");

    DisparityMap dl = d_left, dr = d_right;
    if (fill_occluded) {
        dl = fill_occlusions(d_left, lr_consistency(d_left, d_right, tau));
        // right-view consistency via the mirrored problem
        auto occ_r = lr_consistency(flip_horizontal(d_right), flip_horizontal(d_left), tau);
        std::vector<std::uint8_t> occ_r_unflipped(occ_r.size());
        for (int y = 0; y < d_right.height; ++y)
            for (int x = 0; x < d_right.width; ++x)
                occ_r_unflipped[static_cast<std::size_t>(y) * d_right.width + x] =
                    occ_r[static_cast<std::size_t>(y) * d_right.width + (d_right.width - 1 - x)];
        dr = fill_occlusions(d_right, occ_r_unflipped);
    }

    PlanarImage left = mixture;
    PlanarImage right = mixture;
    WarpResult to_left = warp_from_right(mixture, dl);   // brings right-view G/B to left coords
    WarpResult to_right = warp_from_left(mixture, dr);   // brings left-view R to right coords
    std::copy(to_left.warped.plane(1).begin(), to_left.warped.plane(1).end(),
              left.plane(1).begin());
    std::copy(to_left.warped.plane(2).begin(), to_left.warped.plane(2).end(),
              left.plane(2).begin());
    std::copy(to_right.warped.plane(0).begin(), to_right.warped.plane(0).end(),
              right.plane(0).begin());
    return {std::move(left), std::move(right)};
}

}  // namespace unmix
