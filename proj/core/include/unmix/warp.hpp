#pragma once

#include <cstdint>
#include <vector>

#include "unmix/image.hpp"

namespace unmix {

/// Output of a horizontal bilinear warp, with everything the adjoint pass
/// and the disparity chain rule need. Each warped sample is the convex
/// combination (1-frac)*src[floor] + frac*src[floor+1] on its own row.
struct WarpResult {
    PlanarImage warped;
    Field d_value_d_disparity;          // W x H x C, analytic d(warped)/d(disparity)
    std::vector<int> floor_index;       // W x H source column of the floor tap
    std::vector<double> frac;           // W x H weight of the ceil tap
    std::vector<std::uint8_t> clamped;  // W x H, 1 where the source column was clamped
};

/// Reconstructs the left view from the right image: warped(x,y) =
/// right(x - d_left(x,y), y). Source columns are clamped to [0, W-1] and the
/// disparity derivative is zeroed there so borders cannot drive updates.
WarpResult warp_from_right(const PlanarImage& right, const DisparityMap& d_left);

/// Symmetric right-view reconstruction sampling left(x + d_right(x,y), y).
WarpResult warp_from_left(const PlanarImage& left, const DisparityMap& d_right);

struct WarpAdjoint {
    Field grad_source;     // W x H x C, upstream scattered into the two taps
    Field grad_disparity;  // W x H, upstream . d_value_d_disparity over channels
};

/// Reverse-mode pass of the warp for an upstream gradient on the output.
WarpAdjoint warp_adjoint(const WarpResult& result, const Field& upstream);

}  // namespace unmix
