#include "unmix/image.hpp"

#include <algorithm>
#include <stdexcept>

namespace unmix {

PlanarImage::PlanarImage(int width, int height, int channels, double fill,
                         ValueRange range)
    : w_(width), h_(height), c_(channels), range_(range) {
    if (width < 2 || height < 2)
        throw std::invalid_argument("PlanarImage: dimensions must be at least 2x2");
    if (channels != 1 && channels != 3)
        throw std::invalid_argument("PlanarImage: channel count must be 1 or 3");
    if (!(range.lo < range.hi))
        throw std::invalid_argument("PlanarImage: range.lo must be < range.hi");
    fill = std::clamp(fill, range.lo, range.hi);
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

PlanarImage PlanarImage::from_data(int width, int height, int channels,
                                   std::vector<double> samples, ValueRange range) {
    PlanarImage img(width, height, channels, range.lo, range);
    if (samples.size() != img.sample_count())
        throw std::invalid_argument("PlanarImage: sample buffer size mismatch");
    img.data_ = std::move(samples);
    img.clamp_to_range();
    return img;
}

void PlanarImage::clamp_to_range() {
    for (double& v : data_) v = std::clamp(v, range_.lo, range_.hi);
}

DisparityMap::DisparityMap(int w, int h, double value, bool is_valid)
    : width(w), height(h) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("DisparityMap: dimensions must be positive");
    values.assign(static_cast<std::size_t>(w) * h, value);
    valid.assign(static_cast<std::size_t>(w) * h, is_valid ? 1 : 0);
}

}  // namespace unmix
