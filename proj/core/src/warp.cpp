#include "unmix/warp.hpp"

#include <cmath>
#include <stdexcept>

namespace unmix {
namespace {

WarpResult warp_horizontal(const PlanarImage& source, const DisparityMap& disp,
                           double direction) {
    if (source.width() != disp.width || source.height() != disp.height)
        throw std::invalid_argument("warp: image and disparity dimensions differ");

    int w = source.width(), h = source.height(), ch = source.channels();
    WarpResult res;
    res.warped = PlanarImage(w, h, ch, 0.0, source.range());
    res.d_value_d_disparity = Field(w, h, ch);
    res.floor_index.assign(static_cast<std::size_t>(w) * h, 0);
    res.frac.assign(static_cast<std::size_t>(w) * h, 0.0);
    res.clamped.assign(static_cast<std::size_t>(w) * h, 0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double d = disp.at(x, y);
            if (d < 0.0) throw std::invalid_argument("warp: negative disparity");
            double s = x + direction * d;
            std::size_t p = static_cast<std::size_t>(y) * w + x;
            int i0;
            double f;
            bool clamp = false;
            if (s <= 0.0) {
                i0 = 0;
                f = 0.0;
                clamp = s < 0.0;
            } else if (s >= w - 1) {
                i0 = w - 2;
                f = 1.0;
                clamp = s > w - 1;
            } else {
                i0 = static_cast<int>(s);
                f = s - i0;
            }
            res.floor_index[p] = i0;
            res.frac[p] = f;
            res.clamped[p] = clamp ? 1 : 0;
            for (int c = 0; c < ch; ++c) {
                double v0 = source.at(i0, y, c), v1 = source.at(i0 + 1, y, c);
                res.warped.at(x, y, c) = (1.0 - f) * v0 + f * v1;
                res.d_value_d_disparity.at(x, y, c) =
                    clamp ? 0.0 : direction * (v1 - v0);
            }
        }
    }
    return res;
}

}  // namespace

WarpResult warp_from_right(const PlanarImage& right, const DisparityMap& d_left) {
    return warp_horizontal(right, d_left, -1.0);
}

WarpResult warp_from_left(const PlanarImage& left, const DisparityMap& d_right) {
    return warp_horizontal(left, d_right, +1.0);
}

WarpAdjoint warp_adjoint(const WarpResult& result, const Field& upstream) {
    const PlanarImage& warped = result.warped;
    int w = warped.width(), h = warped.height(), ch = warped.channels();
    if (upstream.width != w || upstream.height != h || upstream.channels != ch)
        throw std::invalid_argument("warp_adjoint: upstream shape mismatch");

    WarpAdjoint adj;
    adj.grad_source = Field(w, h, ch);
    adj.grad_disparity = Field(w, h, 1);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t p = static_cast<std::size_t>(y) * w + x;
            int i0 = result.floor_index[p];
            double f = result.frac[p];
            double dsum = 0.0;
            for (int c = 0; c < ch; ++c) {
                double u = upstream.at(x, y, c);
                adj.grad_source.at(i0, y, c) += (1.0 - f) * u;
                adj.grad_source.at(i0 + 1, y, c) += f * u;
                dsum += u * result.d_value_d_disparity.at(x, y, c);
            }
            adj.grad_disparity.at(x, y) = dsum;
        }
    }
    return adj;
}

}  // namespace unmix
