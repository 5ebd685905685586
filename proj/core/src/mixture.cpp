#include "unmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unmix {

std::optional<MixtureOperator> MixtureOperator::parse(std::string_view name) {
    if (name == "anaglyph") return MixtureOperator{MixtureKind::Anaglyph};
    if (name == "double") return MixtureOperator{MixtureKind::DoubleVision};
    if (name == "mono-left") return MixtureOperator{MixtureKind::MonocularLeft};
    if (name == "mono-right") return MixtureOperator{MixtureKind::MonocularRight};
    return std::nullopt;
}

std::string MixtureOperator::name() const {
    switch (kind) {
        case MixtureKind::Anaglyph: return "anaglyph";
        case MixtureKind::DoubleVision: return "double";
        case MixtureKind::MonocularLeft: return "mono-left";
        case MixtureKind::MonocularRight: return "mono-right";
    }
    return "anaglyph";
}

namespace {

void require_pair(const PlanarImage& left, const PlanarImage& right) {
    if (!left.same_shape(right))
        throw std::invalid_argument("mixture: stereo pair dimensions differ");
    if (left.channels() != 3)
        throw std::invalid_argument("mixture: operators are defined on 3-channel images");
}

}  // namespace

PlanarImage compose(MixtureOperator op, const PlanarImage& left, const PlanarImage& right) {
    require_pair(left, right);
    PlanarImage out(left.width(), left.height(), 3, 0.0, left.range());
    switch (op.kind) {
        case MixtureKind::Anaglyph:
            std::copy(left.plane(0).begin(), left.plane(0).end(), out.plane(0).begin());
            std::copy(right.plane(1).begin(), right.plane(1).end(), out.plane(1).begin());
            std::copy(right.plane(2).begin(), right.plane(2).end(), out.plane(2).begin());
            break;
        case MixtureKind::DoubleVision:
            for (std::size_t i = 0; i < out.sample_count(); ++i)
                out.data()[i] = 0.5 * (left.data()[i] + right.data()[i]);
            break;
        case MixtureKind::MonocularLeft:
            out = left;
            break;
        case MixtureKind::MonocularRight:
            out = right;
            break;
    }
    return out;
}

double constraint_residual(MixtureOperator op, const PlanarImage& mixture,
                           const PlanarImage& left, const PlanarImage& right) {
    require_pair(left, right);
    if (!mixture.same_shape(left))
        throw std::invalid_argument("mixture: mixture dimensions differ from pair");
    PlanarImage composed = compose(op, left, right);
    double worst = 0.0;
    for (std::size_t i = 0; i < composed.sample_count(); ++i)
        worst = std::max(worst, std::abs(composed.data()[i] - mixture.data()[i]));
    return worst;
}

ProjectionResult project(MixtureOperator op, const PlanarImage& mixture,
                         const PlanarImage& left, const PlanarImage& right) {
    require_pair(left, right);
    if (!mixture.same_shape(left))
        throw std::invalid_argument("mixture: mixture dimensions differ from pair");

    ProjectionResult res{left, right, 0};
    switch (op.kind) {
        case MixtureKind::Anaglyph:
            std::copy(mixture.plane(0).begin(), mixture.plane(0).end(), res.left.plane(0).begin());
            std::copy(mixture.plane(1).begin(), mixture.plane(1).end(), res.right.plane(1).begin());
            std::copy(mixture.plane(2).begin(), mixture.plane(2).end(), res.right.plane(2).begin());
            break;
        case MixtureKind::DoubleVision: {
            // Per sample the feasible set {(l,r): (l+r)/2 = m, lo<=l,r<=hi} is a
            // segment; project onto the constraint line, then clamp along it so
            // the average stays exact and the result stays inside the range.
            ValueRange rg = left.range();
            for (std::size_t i = 0; i < res.left.sample_count(); ++i) {
                double m = mixture.data()[i];
                double l = left.data()[i], r = right.data()[i];
                double c = m - 0.5 * (l + r);
                double lp = l + c;
                double l_min = std::max(rg.lo, 2.0 * m - rg.hi);
                double l_max = std::min(rg.hi, 2.0 * m - rg.lo);
                double lq = std::clamp(lp, l_min, l_max);
                if (lq != lp) ++res.clamped;
                res.left.data()[i] = lq;
                res.right.data()[i] = 2.0 * m - lq;
            }
            break;
        }
        case MixtureKind::MonocularLeft:
            res.left = mixture;
            break;
        case MixtureKind::MonocularRight:
            res.right = mixture;
            break;
    }
    return res;
}

}  // namespace unmix
