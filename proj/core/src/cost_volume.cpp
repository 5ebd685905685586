#include "unmix/cost_volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unmix {
namespace {

inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

}  // namespace

CostVolume build_cost_volume(const PlanarImage& left, const PlanarImage& right,
                             int d_max, const LossWeights& w) {
    w.validate();
    if (!left.same_shape(right))
        throw std::invalid_argument("build_cost_volume: dimension mismatch");
    if (d_max < 1) throw std::invalid_argument("build_cost_volume: d_max must be >= 1");

    int iw = left.width(), ih = left.height(), ch = left.channels();
    CostVolume cv;
    cv.width = iw;
    cv.height = ih;
    cv.d_max = d_max;
    cv.max_cost = w.lambda1 + w.lambda2;
    cv.costs.assign(static_cast<std::size_t>(iw) * ih * (d_max + 1), cv.max_cost);

    PlanarImage shifted(iw, ih, ch, 0.0, right.range());
    Field absdiff(iw, ih, ch);
    for (int d = 0; d <= d_max; ++d) {
        for (int c = 0; c < ch; ++c) {
            for (int y = 0; y < ih; ++y)
                for (int x = 0; x < iw; ++x)
                    shifted.at(x, y, c) = right.at(std::max(x - d, 0), y, c);
        }
        PlanarImage s = ssim_map(left, shifted);
        for (int c = 0; c < ch; ++c)
            for (int y = 0; y < ih; ++y)
                for (int x = 0; x < iw; ++x)
                    absdiff.at(x, y, c) = std::abs(left.at(x, y, c) - shifted.at(x, y, c));

        double inv_c = 1.0 / ch;
        for (int y = 0; y < ih; ++y) {
            for (int x = 0; x < iw; ++x) {
                if (x - d < 0) continue;  // stays at max_cost
                double cost = 0.0;
                for (int c = 0; c < ch; ++c) {
                    double box = 0.0;
                    for (int dy = -1; dy <= 1; ++dy) {
                        int yy = reflect(y + dy, ih);
                        for (int dx = -1; dx <= 1; ++dx)
                            box += absdiff.at(reflect(x + dx, iw), yy, c);
                    }
                    box /= 9.0;
                    cost += w.lambda1 * 0.5 * (1.0 - s.at(x, y, c)) + w.lambda2 * box;
                }
                cv.at(x, y, d) = cost * inv_c;
            }
        }
    }
    return cv;
}

DisparityMap wta_disparity(const CostVolume& cv) {
    if (cv.costs.empty()) throw std::invalid_argument("wta_disparity: empty volume");
    DisparityMap map(cv.width, cv.height);
    for (int y = 0; y < cv.height; ++y) {
        for (int x = 0; x < cv.width; ++x) {
            int best = 0;
            double best_cost = cv.at(x, y, 0);
            for (int d = 1; d <= cv.d_max; ++d) {
                double c = cv.at(x, y, d);
                if (c < best_cost) {
                    best_cost = c;
                    best = d;
                }
            }
            double refined = best;
            if (best > 0 && best < cv.d_max) {
                double cm = cv.at(x, y, best - 1);
                double cp = cv.at(x, y, best + 1);
                double denom = cm + cp - 2.0 * best_cost;
                if (denom > 1e-12) {
                    double offset = std::clamp((cm - cp) / (2.0 * denom), -0.5, 0.5);
                    refined = best + offset;
                }
            }
            map.at(x, y) = refined;
        }
    }
    return map;
}

}  // namespace unmix
