#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "unmix/image.hpp"

namespace unmix {

/// Left-right consistency check: pixel (x,y) is flagged occluded iff
/// |d_left(x,y) - d_right(x - round(d_left(x,y)), y)| > tau or the lookup
/// falls outside the image. Returns 1 per occluded pixel, row-major.
std::vector<std::uint8_t> lr_consistency(const DisparityMap& d_left,
                                         const DisparityMap& d_right, double tau);

/// Scanline fill for flagged pixels: each takes the first non-flagged value
/// found scanning left and right along its row, preferring the smaller
/// disparity (background); rows with no candidate take the global median.
/// Idempotent under a fixed mask.
DisparityMap fill_occlusions(const DisparityMap& d, const std::vector<std::uint8_t>& occluded);

/// Restores a full-colour stereo pair from an anaglyph by warping the
/// mixture channels with the estimated disparities: left G/B sampled from
/// the mixture at x - d_left, right R at x + d_right. Pinned channels are
/// copied bit-exactly. With fill_occluded, occlusions detected by the
/// consistency check are filled background-first before warping.
std::pair<PlanarImage, PlanarImage> colorize_anaglyph(const PlanarImage& mixture,
                                                      const DisparityMap& d_left,
                                                      const DisparityMap& d_right,
                                                      bool fill_occluded = true,
                                                      double tau = 1.0);

}  // namespace unmix
