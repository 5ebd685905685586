#pragma once

#include <vector>

#include "unmix/image.hpp"

namespace unmix {

/// Forward difference along x: out(x,y) = img(x+1,y) - img(x,y), last column 0.
PlanarImage grad_u(const PlanarImage& img);
/// Forward difference along y: out(x,y) = img(x,y+1) - img(x,y), last row 0.
PlanarImage grad_v(const PlanarImage& img);

/// Plane kernels shared with the loss gradients (in/out length w*h).
void grad_u_plane(const double* in, int w, int h, double* out);
void grad_v_plane(const double* in, int w, int h, double* out);

/// 2x2 box-filter downsampling; odd trailing rows/columns are dropped.
PlanarImage downsample2(const PlanarImage& img);
/// Disparity variant: values are additionally halved (pixel units shrink).
DisparityMap downsample2(const DisparityMap& map);

/// Level 0 is the input itself; each further level halves both dimensions.
std::vector<PlanarImage> build_pyramid(const PlanarImage& img, int levels);
std::vector<DisparityMap> build_pyramid(const DisparityMap& map, int levels);

/// Bilinear resize with half-pixel-centre mapping and clamped borders.
PlanarImage resize_bilinear(const PlanarImage& img, int out_w, int out_h);
/// Resize plus the disparity value rescale (values multiplied by out_w/in_w).
DisparityMap resize_disparity(const DisparityMap& map, int out_w, int out_h);

PlanarImage flip_horizontal(const PlanarImage& img);
DisparityMap flip_horizontal(const DisparityMap& map);

/// 3x3 median filter (window clipped at borders, lower median).
DisparityMap median3(const DisparityMap& map);

/// Removes a border of `margin` pixels on every side.
PlanarImage crop_border(const PlanarImage& img, int margin);

}  // namespace unmix
