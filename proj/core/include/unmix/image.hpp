#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace unmix {

/// Declared value range of an image. Samples are kept inside [lo, hi];
/// I/O maps [lo, hi] linearly onto the integer range of the file format.
struct ValueRange {
    double lo = 0.0;
    double hi = 1.0;
    double span() const { return hi - lo; }
};

/// Dense H x W x C image with per-channel (planar) row-major storage.
/// Channel count is 1 (gray) or 3 (RGB); both dimensions are at least 2
/// so that finite-difference operators are defined everywhere.
class PlanarImage {
public:
    PlanarImage() = default;
    PlanarImage(int width, int height, int channels, double fill = 0.0,
                ValueRange range = {0.0, 1.0});

    /// Adopts a sample buffer (layout: plane c, then row y, then column x).
    /// Samples are clamped into the declared range.
    static PlanarImage from_data(int width, int height, int channels,
                                 std::vector<double> samples,
                                 ValueRange range = {0.0, 1.0});

    int width() const { return w_; }
    int height() const { return h_; }
    int channels() const { return c_; }
    ValueRange range() const { return range_; }
    std::size_t sample_count() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(c) * h_ + y) * w_ + x];
    }
    double at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(c) * h_ + y) * w_ + x];
    }

    std::span<double> plane(int c) {
        return {data_.data() + static_cast<std::size_t>(c) * h_ * w_,
                static_cast<std::size_t>(h_) * w_};
    }
    std::span<const double> plane(int c) const {
        return {data_.data() + static_cast<std::size_t>(c) * h_ * w_,
                static_cast<std::size_t>(h_) * w_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void clamp_to_range();
    bool same_shape(const PlanarImage& other) const {
        return w_ == other.w_ && h_ == other.h_ && c_ == other.c_;
    }

private:
    int w_ = 0, h_ = 0, c_ = 0;
    ValueRange range_{};
    std::vector<double> data_;
};

/// Dense disparity field with a per-pixel validity mask. Invalid pixels
/// (holes in ground-truth maps) are excluded from every metric and loss.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    DisparityMap() = default;
    DisparityMap(int w, int h, double value = 0.0, bool is_valid = true);

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool is_valid(int x, int y) const {
        return valid[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set_valid(int x, int y, bool v) {
        valid[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t pixel_count() const { return values.size(); }
    bool same_shape(const DisparityMap& other) const {
        return width == other.width && height == other.height;
    }
};

/// Plain W x H x C buffer for gradients and per-sample derivatives.
/// Unlike PlanarImage it carries no range semantics and is never clamped.
struct Field {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    Field() = default;
    Field(int w, int h, int c = 1)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, 0.0) {}

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    std::size_t size() const { return data.size(); }
};

}  // namespace unmix
