#include "unmix/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "unmix/image_ops.hpp"
#include "unmix/warp.hpp"

namespace unmix {
namespace {

constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// mirror-101 reflection: -1 -> 1, n -> n-2
inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

void require_same_shape(const PlanarImage& a, const PlanarImage& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

void LossWeights::validate() const {
    if (alpha_c < 0 || alpha_p < 0 || omega_w < 0 || omega_s < 0 || lambda1 < 0 || lambda2 < 0)
        throw std::invalid_argument("LossWeights: weights must be non-negative");
    if (std::abs(lambda1 + lambda2 - 1.0) > 1e-9)
        throw std::invalid_argument("LossWeights: lambda1 + lambda2 must equal 1");
}

ValueGrad content_loss(const PlanarImage& pred, const PlanarImage& target) {
    require_same_shape(pred, target, "content_loss");
    ValueGrad out;
    out.grad = Field(pred.width(), pred.height(), pred.channels());
    double inv_n = 1.0 / static_cast<double>(pred.sample_count());
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.sample_count(); ++i) {
        double diff = pred.data()[i] - target.data()[i];
        sum += std::abs(diff);
        out.grad.data[i] = sgn(diff) * inv_n;
    }
    out.value = sum * inv_n;
    return out;
}

ValueGrad tv_prior(const PlanarImage& pred) {
    int w = pred.width(), h = pred.height(), ch = pred.channels();
    ValueGrad out;
    out.grad = Field(w, h, ch);
    double inv_n = 1.0 / static_cast<double>(pred.sample_count());
    double sum = 0.0;
    for (int c = 0; c < ch; ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (x + 1 < w) {
                    double g = pred.at(x + 1, y, c) - pred.at(x, y, c);
                    sum += std::abs(g);
                    double s = sgn(g) * inv_n;
                    out.grad.at(x + 1, y, c) += s;
                    out.grad.at(x, y, c) -= s;
                }
                if (y + 1 < h) {
                    double g = pred.at(x, y + 1, c) - pred.at(x, y, c);
                    sum += std::abs(g);
                    double s = sgn(g) * inv_n;
                    out.grad.at(x, y + 1, c) += s;
                    out.grad.at(x, y, c) -= s;
                }
            }
        }
    }
    out.value = sum * inv_n;
    return out;
}

namespace {

struct WindowStats {
    double mu_a, mu_b, var_a, var_b, cov;
};

inline WindowStats window_stats(const PlanarImage& a, const PlanarImage& b,
                                int x, int y, int c) {
    int w = a.width(), h = a.height();
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        int yy = reflect(y + dy, h);
        for (int dx = -1; dx <= 1; ++dx) {
            int xx = reflect(x + dx, w);
            double av = a.at(xx, yy, c), bv = b.at(xx, yy, c);
            sa += av;
            sb += bv;
            saa += av * av;
            sbb += bv * bv;
            sab += av * bv;
        }
    }
    constexpr double inv9 = 1.0 / 9.0;
    WindowStats s;
    s.mu_a = sa * inv9;
    s.mu_b = sb * inv9;
    s.var_a = saa * inv9 - s.mu_a * s.mu_a;
    s.var_b = sbb * inv9 - s.mu_b * s.mu_b;
    s.cov = sab * inv9 - s.mu_a * s.mu_b;
    return s;
}

inline double ssim_from_stats(const WindowStats& s) {
    double a1 = 2.0 * s.mu_a * s.mu_b + kSsimC1;
    double a2 = 2.0 * s.cov + kSsimC2;
    double b1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + kSsimC1;
    double b2 = s.var_a + s.var_b + kSsimC2;
    return (a1 * a2) / (b1 * b2);
}

}  // namespace

PlanarImage ssim_map(const PlanarImage& a, const PlanarImage& b) {
    require_same_shape(a, b, "ssim_map");
    PlanarImage out(a.width(), a.height(), a.channels(), 0.0, ValueRange{-1.0, 1.0});
    for (int c = 0; c < a.channels(); ++c)
        for (int y = 0; y < a.height(); ++y)
            for (int x = 0; x < a.width(); ++x)
                out.at(x, y, c) = ssim_from_stats(window_stats(a, b, x, y, c));
    return out;
}

Field ssim_backward(const PlanarImage& a, const PlanarImage& b, const Field& upstream) {
    require_same_shape(a, b, "ssim_backward");
    int w = a.width(), h = a.height(), ch = a.channels();
    if (upstream.width != w || upstream.height != h || upstream.channels != ch)
        throw std::invalid_argument("ssim_backward: upstream shape mismatch");

    Field grad(w, h, ch);
    constexpr double inv9 = 1.0 / 9.0;
    for (int c = 0; c < ch; ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double u = upstream.at(x, y, c);
                if (u == 0.0) continue;
                WindowStats s = window_stats(a, b, x, y, c);
                double a1 = 2.0 * s.mu_a * s.mu_b + kSsimC1;
                double a2 = 2.0 * s.cov + kSsimC2;
                double b1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + kSsimC1;
                double b2 = s.var_a + s.var_b + kSsimC2;
                double inv_b1b2 = 1.0 / (b1 * b2);
                double f = a1 * a2 * inv_b1b2;
                // d f / d mu_a, var_a, cov
                double df_dmu = 2.0 * s.mu_b * a2 * inv_b1b2 - 2.0 * s.mu_a * f / b1;
                double df_dvar = -f / b2;
                double df_dcov = 2.0 * a1 * inv_b1b2;
                for (int dy = -1; dy <= 1; ++dy) {
                    int yy = reflect(y + dy, h);
                    for (int dx = -1; dx <= 1; ++dx) {
                        int xx = reflect(x + dx, w);
                        double av = a.at(xx, yy, c), bv = b.at(xx, yy, c);
                        double d = inv9 * (df_dmu + df_dvar * 2.0 * (av - s.mu_a) +
                                           df_dcov * (bv - s.mu_b));
                        grad.at(xx, yy, c) += u * d;
                    }
                }
            }
        }
    }
    return grad;
}

AppearanceGrads appearance_loss_full(const PlanarImage& observed,
                                     const PlanarImage& reconstructed,
                                     const LossWeights& w) {
    require_same_shape(observed, reconstructed, "appearance_loss");
    int iw = observed.width(), ih = observed.height(), ch = observed.channels();
    double inv_n = 1.0 / static_cast<double>(observed.sample_count());

    AppearanceGrads out;
    out.grad_reconstructed = Field(iw, ih, ch);
    out.grad_observed = Field(iw, ih, ch);

    double sum = 0.0;
    for (std::size_t i = 0; i < observed.sample_count(); ++i) {
        double diff = reconstructed.data()[i] - observed.data()[i];
        sum += w.lambda2 * std::abs(diff);
        double l1g = w.lambda2 * sgn(diff) * inv_n;
        out.grad_reconstructed.data[i] += l1g;
        out.grad_observed.data[i] -= l1g;
    }

    if (w.lambda1 > 0.0) {
        PlanarImage s = ssim_map(observed, reconstructed);
        Field up(iw, ih, ch);  // upstream for the SSIM terms: -lambda1/(2N) each
        for (std::size_t i = 0; i < s.sample_count(); ++i) {
            sum += w.lambda1 * 0.5 * (1.0 - s.data()[i]);
            up.data[i] = -0.5 * w.lambda1 * inv_n;
        }
        Field g_rec = ssim_backward(reconstructed, observed, up);
        Field g_obs = ssim_backward(observed, reconstructed, up);
        for (std::size_t i = 0; i < g_rec.size(); ++i) {
            out.grad_reconstructed.data[i] += g_rec.data[i];
            out.grad_observed.data[i] += g_obs.data[i];
        }
    }
    out.value = sum * inv_n;
    return out;
}

ValueGrad appearance_loss(const PlanarImage& observed, const PlanarImage& reconstructed,
                          const LossWeights& w) {
    AppearanceGrads full = appearance_loss_full(observed, reconstructed, w);
    return {full.value, std::move(full.grad_reconstructed)};
}

SmoothnessGrads smoothness_loss_full(const DisparityMap& d, const PlanarImage& img) {
    if (d.width != img.width() || d.height != img.height())
        throw std::invalid_argument("smoothness_loss: dimension mismatch");
    int w = d.width, h = d.height, ch = img.channels();
    double inv_n = 1.0 / static_cast<double>(d.pixel_count());
    double inv_c = 1.0 / static_cast<double>(ch);

    SmoothnessGrads out;
    out.grad_disparity = Field(w, h, 1);
    out.grad_image = Field(w, h, ch);

    double sum = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) {
                double gd = d.at(x + 1, y) - d.at(x, y);
                double mag = 0.0;
                for (int c = 0; c < ch; ++c)
                    mag += std::abs(img.at(x + 1, y, c) - img.at(x, y, c));
                mag *= inv_c;
                double weight = std::exp(-mag);
                sum += std::abs(gd) * weight;
                double s = sgn(gd) * weight * inv_n;
                out.grad_disparity.at(x + 1, y) += s;
                out.grad_disparity.at(x, y) -= s;
                // d weight / d image samples
                double wchain = -std::abs(gd) * weight * inv_c * inv_n;
                for (int c = 0; c < ch; ++c) {
                    double si = sgn(img.at(x + 1, y, c) - img.at(x, y, c));
                    out.grad_image.at(x + 1, y, c) += wchain * si;
                    out.grad_image.at(x, y, c) -= wchain * si;
                }
            }
            if (y + 1 < h) {
                double gd = d.at(x, y + 1) - d.at(x, y);
                double mag = 0.0;
                for (int c = 0; c < ch; ++c)
                    mag += std::abs(img.at(x, y + 1, c) - img.at(x, y, c));
                mag *= inv_c;
                double weight = std::exp(-mag);
                sum += std::abs(gd) * weight;
                double s = sgn(gd) * weight * inv_n;
                out.grad_disparity.at(x, y + 1) += s;
                out.grad_disparity.at(x, y) -= s;
                double wchain = -std::abs(gd) * weight * inv_c * inv_n;
                for (int c = 0; c < ch; ++c) {
                    double si = sgn(img.at(x, y + 1, c) - img.at(x, y, c));
                    out.grad_image.at(x, y + 1, c) += wchain * si;
                    out.grad_image.at(x, y, c) -= wchain * si;
                }
            }
        }
    }
    out.value = sum * inv_n;
    return out;
}

ValueGrad smoothness_loss(const DisparityMap& d, const PlanarImage& img) {
    SmoothnessGrads full = smoothness_loss_full(d, img);
    return {full.value, std::move(full.grad_disparity)};
}

namespace {

// Content terms against the mixture-pinned channels; with hard projection
// these are exactly zero and serve as diagnostics.
void accumulate_content(const PlanarImage& left, const PlanarImage& right,
                        const PlanarImage& mixture, MixtureOperator op,
                        double alpha_c, LossBreakdown& bd,
                        Field& grad_left, Field& grad_right) {
    int w = left.width(), h = left.height();
    std::size_t plane_n = static_cast<std::size_t>(w) * h;
    switch (op.kind) {
        case MixtureKind::Anaglyph: {
            double inv_l = 1.0 / static_cast<double>(plane_n);
            double sum_l = 0.0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double diff = left.at(x, y, 0) - mixture.at(x, y, 0);
                    sum_l += std::abs(diff);
                    grad_left.at(x, y, 0) += alpha_c * sgn(diff) * inv_l;
                }
            bd.content_left = sum_l * inv_l;

            double inv_r = 1.0 / static_cast<double>(2 * plane_n);
            double sum_r = 0.0;
            for (int c = 1; c <= 2; ++c)
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) {
                        double diff = right.at(x, y, c) - mixture.at(x, y, c);
                        sum_r += std::abs(diff);
                        grad_right.at(x, y, c) += alpha_c * sgn(diff) * inv_r;
                    }
            bd.content_right = sum_r * inv_r;
            break;
        }
        case MixtureKind::DoubleVision: {
            double inv_n = 1.0 / static_cast<double>(left.sample_count());
            double sum = 0.0;
            for (std::size_t i = 0; i < left.sample_count(); ++i) {
                double diff = 0.5 * (left.data()[i] + right.data()[i]) - mixture.data()[i];
                sum += std::abs(diff);
                double g = alpha_c * sgn(diff) * 0.5 * inv_n;
                grad_left.data[i] += g;
                grad_right.data[i] += g;
            }
            bd.content_left = bd.content_right = 0.5 * sum * inv_n;
            break;
        }
        case MixtureKind::MonocularLeft: {
            double inv_n = 1.0 / static_cast<double>(left.sample_count());
            double sum = 0.0;
            for (std::size_t i = 0; i < left.sample_count(); ++i) {
                double diff = left.data()[i] - mixture.data()[i];
                sum += std::abs(diff);
                grad_left.data[i] += alpha_c * sgn(diff) * inv_n;
            }
            bd.content_left = sum * inv_n;
            break;
        }
        case MixtureKind::MonocularRight: {
            double inv_n = 1.0 / static_cast<double>(right.sample_count());
            double sum = 0.0;
            for (std::size_t i = 0; i < right.sample_count(); ++i) {
                double diff = right.data()[i] - mixture.data()[i];
                sum += std::abs(diff);
                grad_right.data[i] += alpha_c * sgn(diff) * inv_n;
            }
            bd.content_right = sum * inv_n;
            break;
        }
    }
}

}  // namespace

TotalLossResult total_loss(const PlanarImage& left, const PlanarImage& right,
                           const DisparityMap& d_left, const DisparityMap& d_right,
                           const PlanarImage& mixture, MixtureOperator op,
                           const LossWeights& w) {
    w.validate();
    require_same_shape(left, right, "total_loss");
    require_same_shape(left, mixture, "total_loss");

    int iw = left.width(), ih = left.height(), ch = left.channels();
    TotalLossResult res;
    res.grad_left = Field(iw, ih, ch);
    res.grad_right = Field(iw, ih, ch);
    res.grad_d_left = Field(iw, ih, 1);
    res.grad_d_right = Field(iw, ih, 1);

    // disabled terms (zero weight) are skipped and reported as zero
    if (w.alpha_c > 0.0)
        accumulate_content(left, right, mixture, op, w.alpha_c, res.breakdown,
                           res.grad_left, res.grad_right);

    if (w.alpha_p > 0.0) {
        ValueGrad prior_l = tv_prior(left);
        ValueGrad prior_r = tv_prior(right);
        res.breakdown.prior_left = prior_l.value;
        res.breakdown.prior_right = prior_r.value;
        for (std::size_t i = 0; i < prior_l.grad.size(); ++i) {
            res.grad_left.data[i] += w.alpha_p * prior_l.grad.data[i];
            res.grad_right.data[i] += w.alpha_p * prior_r.grad.data[i];
        }
    }

    if (w.omega_w > 0.0) {
        // Left reconstruction from the right view, evaluated at left coordinates.
        WarpResult warp_l = warp_from_right(right, d_left);
        AppearanceGrads app_l = appearance_loss_full(left, warp_l.warped, w);
        res.breakdown.warp_left = app_l.value;
        WarpAdjoint adj_l = warp_adjoint(warp_l, app_l.grad_reconstructed);
        for (std::size_t i = 0; i < app_l.grad_observed.size(); ++i) {
            res.grad_left.data[i] += w.omega_w * app_l.grad_observed.data[i];
            res.grad_right.data[i] += w.omega_w * adj_l.grad_source.data[i];
        }
        for (std::size_t i = 0; i < adj_l.grad_disparity.size(); ++i)
            res.grad_d_left.data[i] += w.omega_w * adj_l.grad_disparity.data[i];

        // Right reconstruction from the left view.
        WarpResult warp_r = warp_from_left(left, d_right);
        AppearanceGrads app_r = appearance_loss_full(right, warp_r.warped, w);
        res.breakdown.warp_right = app_r.value;
        WarpAdjoint adj_r = warp_adjoint(warp_r, app_r.grad_reconstructed);
        for (std::size_t i = 0; i < app_r.grad_observed.size(); ++i) {
            res.grad_right.data[i] += w.omega_w * app_r.grad_observed.data[i];
            res.grad_left.data[i] += w.omega_w * adj_r.grad_source.data[i];
        }
        for (std::size_t i = 0; i < adj_r.grad_disparity.size(); ++i)
            res.grad_d_right.data[i] += w.omega_w * adj_r.grad_disparity.data[i];
    }

    if (w.omega_s > 0.0) {
        SmoothnessGrads smooth_l = smoothness_loss_full(d_left, left);
        SmoothnessGrads smooth_r = smoothness_loss_full(d_right, right);
        res.breakdown.smooth_left = smooth_l.value;
        res.breakdown.smooth_right = smooth_r.value;
        for (std::size_t i = 0; i < smooth_l.grad_disparity.size(); ++i) {
            res.grad_d_left.data[i] += w.omega_s * smooth_l.grad_disparity.data[i];
            res.grad_d_right.data[i] += w.omega_s * smooth_r.grad_disparity.data[i];
        }
        for (std::size_t i = 0; i < smooth_l.grad_image.size(); ++i) {
            res.grad_left.data[i] += w.omega_s * smooth_l.grad_image.data[i];
            res.grad_right.data[i] += w.omega_s * smooth_r.grad_image.data[i];
        }
    }

    res.breakdown.total = res.breakdown.weighted_sum(w);
    return res;
}

}  // namespace unmix
