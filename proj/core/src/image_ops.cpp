#include "unmix/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unmix {

void grad_u_plane(const double* in, int w, int h, double* out) {
    for (int y = 0; y < h; ++y) {
        const double* row = in + static_cast<std::size_t>(y) * w;
        double* orow = out + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w - 1; ++x) orow[x] = row[x + 1] - row[x];
        orow[w - 1] = 0.0;
    }
}

void grad_v_plane(const double* in, int w, int h, double* out) {
    for (int y = 0; y < h - 1; ++y) {
        const double* row = in + static_cast<std::size_t>(y) * w;
        double* orow = out + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) orow[x] = row[x + w] - row[x];
    }
    double* last = out + static_cast<std::size_t>(h - 1) * w;
    std::fill(last, last + w, 0.0);
}

namespace {

PlanarImage gradient_image(const PlanarImage& img, bool along_u) {
    ValueRange r = img.range();
    ValueRange gr{r.lo - r.hi, r.hi - r.lo};
    PlanarImage out(img.width(), img.height(), img.channels(), 0.0, gr);
    for (int c = 0; c < img.channels(); ++c) {
        if (along_u)
            grad_u_plane(img.plane(c).data(), img.width(), img.height(), out.plane(c).data());
        else
            grad_v_plane(img.plane(c).data(), img.width(), img.height(), out.plane(c).data());
    }
    return out;
}

}  // namespace

PlanarImage grad_u(const PlanarImage& img) { return gradient_image(img, true); }
PlanarImage grad_v(const PlanarImage& img) { return gradient_image(img, false); }

PlanarImage downsample2(const PlanarImage& img) {
    int w2 = img.width() / 2, h2 = img.height() / 2;
    if (w2 < 2 || h2 < 2)
        throw std::invalid_argument("downsample2: image too small");
    PlanarImage out(w2, h2, img.channels(), 0.0, img.range());
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < h2; ++y) {
            for (int x = 0; x < w2; ++x) {
                out.at(x, y, c) = 0.25 * (img.at(2 * x, 2 * y, c) + img.at(2 * x + 1, 2 * y, c) +
                                          img.at(2 * x, 2 * y + 1, c) + img.at(2 * x + 1, 2 * y + 1, c));
            }
        }
    }
    return out;
}

DisparityMap downsample2(const DisparityMap& map) {
    int w2 = map.width / 2, h2 = map.height / 2;
    if (w2 < 1 || h2 < 1)
        throw std::invalid_argument("downsample2: disparity map too small");
    DisparityMap out(w2, h2);
    for (int y = 0; y < h2; ++y) {
        for (int x = 0; x < w2; ++x) {
            double sum = 0.0;
            int n = 0;
            bool any = false;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx)
                    if (map.is_valid(2 * x + dx, 2 * y + dy)) {
                        sum += map.at(2 * x + dx, 2 * y + dy);
                        ++n;
                        any = true;
                    }
            out.at(x, y) = any ? 0.5 * sum / n : 0.0;
            out.set_valid(x, y, any);
        }
    }
    return out;
}

std::vector<PlanarImage> build_pyramid(const PlanarImage& img, int levels) {
    if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
    int need = 2 << (levels - 1);  // finest dimension that survives levels-1 halvings
    if (levels > 1 && (img.width() < need || img.height() < need))
        throw std::invalid_argument("build_pyramid: image too small for requested levels");
    std::vector<PlanarImage> pyr;
    pyr.reserve(levels);
    pyr.push_back(img);
    for (int l = 1; l < levels; ++l) pyr.push_back(downsample2(pyr.back()));
    return pyr;
}

std::vector<DisparityMap> build_pyramid(const DisparityMap& map, int levels) {
    if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
    std::vector<DisparityMap> pyr;
    pyr.reserve(levels);
    pyr.push_back(map);
    for (int l = 1; l < levels; ++l) pyr.push_back(downsample2(pyr.back()));
    return pyr;
}

namespace {

// half-pixel-centre source coordinate for bilinear resize
inline double src_coord(int dst, int dst_size, int src_size) {
    return (dst + 0.5) * static_cast<double>(src_size) / dst_size - 0.5;
}

}  // namespace

PlanarImage resize_bilinear(const PlanarImage& img, int out_w, int out_h) {
    if (out_w < 2 || out_h < 2)
        throw std::invalid_argument("resize_bilinear: output must be at least 2x2");
    PlanarImage out(out_w, out_h, img.channels(), 0.0, img.range());
    int w = img.width(), h = img.height();
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < out_h; ++y) {
            double sy = std::clamp(src_coord(y, out_h, h), 0.0, static_cast<double>(h - 1));
            int y0 = std::min(static_cast<int>(sy), h - 2);
            double fy = sy - y0;
            for (int x = 0; x < out_w; ++x) {
                double sx = std::clamp(src_coord(x, out_w, w), 0.0, static_cast<double>(w - 1));
                int x0 = std::min(static_cast<int>(sx), w - 2);
                double fx = sx - x0;
                double v00 = img.at(x0, y0, c), v10 = img.at(x0 + 1, y0, c);
                double v01 = img.at(x0, y0 + 1, c), v11 = img.at(x0 + 1, y0 + 1, c);
                out.at(x, y, c) = (1 - fy) * ((1 - fx) * v00 + fx * v10) +
                                  fy * ((1 - fx) * v01 + fx * v11);
            }
        }
    }
    return out;
}

DisparityMap resize_disparity(const DisparityMap& map, int out_w, int out_h) {
    DisparityMap out(out_w, out_h);
    double value_scale = static_cast<double>(out_w) / map.width;
    int w = map.width, h = map.height;
    for (int y = 0; y < out_h; ++y) {
        double sy = std::clamp(src_coord(y, out_h, h), 0.0, static_cast<double>(h - 1));
        int y0 = std::min(static_cast<int>(sy), std::max(h - 2, 0));
        double fy = h > 1 ? sy - y0 : 0.0;
        for (int x = 0; x < out_w; ++x) {
            double sx = std::clamp(src_coord(x, out_w, w), 0.0, static_cast<double>(w - 1));
            int x0 = std::min(static_cast<int>(sx), std::max(w - 2, 0));
            double fx = w > 1 ? sx - x0 : 0.0;
            int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
            double v = (1 - fy) * ((1 - fx) * map.at(x0, y0) + fx * map.at(x1, y0)) +
                       fy * ((1 - fx) * map.at(x0, y1) + fx * map.at(x1, y1));
            out.at(x, y) = v * value_scale;
            out.set_valid(x, y, map.is_valid(x0, y0) && map.is_valid(x1, y0) &&
                                map.is_valid(x0, y1) && map.is_valid(x1, y1));
        }
    }
    return out;
}

PlanarImage flip_horizontal(const PlanarImage& img) {
    PlanarImage out(img.width(), img.height(), img.channels(), 0.0, img.range());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                out.at(x, y, c) = img.at(img.width() - 1 - x, y, c);
    return out;
}

DisparityMap flip_horizontal(const DisparityMap& map) {
    DisparityMap out(map.width, map.height);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            out.at(x, y) = map.at(map.width - 1 - x, y);
            out.set_valid(x, y, map.is_valid(map.width - 1 - x, y));
        }
    return out;
}

DisparityMap median3(const DisparityMap& map) {
    DisparityMap out = map;
    double window[9];
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                int yy = y + dy;
                if (yy < 0 || yy >= map.height) continue;
                for (int dx = -1; dx <= 1; ++dx) {
                    int xx = x + dx;
                    if (xx < 0 || xx >= map.width) continue;
                    if (!map.is_valid(xx, yy)) continue;
                    window[n++] = map.at(xx, yy);
                }
            }
            if (n == 0) continue;
            std::nth_element(window, window + (n - 1) / 2, window + n);
            out.at(x, y) = window[(n - 1) / 2];
        }
    }
    return out;
}

PlanarImage crop_border(const PlanarImage& img, int margin) {
    if (margin <= 0) return img;
    int w = img.width() - 2 * margin, h = img.height() - 2 * margin;
    if (w < 2 || h < 2) throw std::invalid_argument("crop_border: margin too large");
    PlanarImage out(w, h, img.channels(), 0.0, img.range());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(x, y, c) = img.at(x + margin, y + margin, c);
    return out;
}

}  // namespace unmix
