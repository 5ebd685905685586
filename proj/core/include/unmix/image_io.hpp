#pragma once

#include <string>

#include "unmix/image.hpp"

namespace unmix {

/// Loads an 8- or 16-bit PNG, PPM or PGM image (detected by magic bytes)
/// and scales samples linearly into [0, 1].
PlanarImage load_image(const std::string& path);

/// Saves as PNG (or binary PPM/PGM when the extension says so). Samples are
/// clamped to the image's declared range and quantized round-to-nearest,
/// so a save/load round trip is within 1/(2*(2^bits-1)) per sample.
void save_image(const PlanarImage& img, const std::string& path, int bit_depth = 8);

/// Reads a grayscale "Pf" PFM file. The sign of the scale line selects the
/// payload endianness; rows are stored bottom-up and converted to top-down.
/// Non-positive or non-finite values are marked invalid. Any dataset scale
/// factor is up to the caller.
DisparityMap load_pfm(const std::string& path);

/// Writes a grayscale "Pf" PFM (little endian, scale -1.0, bottom-up rows).
/// Invalid pixels are stored as 0.
void save_pfm(const DisparityMap& map, const std::string& path);

/// Reads a KITTI-encoded disparity map: 16-bit single-channel PNG,
/// disparity = stored / 256.0, stored 0 marks an invalid pixel.
DisparityMap load_kitti_disparity(const std::string& path);

/// Writes the KITTI encoding: stored = round(256 * d) clamped to [0, 65535],
/// invalid pixels stored as 0.
void save_kitti_disparity(const DisparityMap& map, const std::string& path);

}  // namespace unmix
