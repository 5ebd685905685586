#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "unmix/image.hpp"

namespace unmix {

enum class MixtureKind { Anaglyph, DoubleVision, MonocularLeft, MonocularRight };

/// The known composition operator f with I = f(I_L, I_R).
struct MixtureOperator {
    MixtureKind kind = MixtureKind::Anaglyph;

    /// Accepts the CLI spellings: anaglyph | double | mono-left | mono-right.
    static std::optional<MixtureOperator> parse(std::string_view name);
    std::string name() const;
};

/// Applies f to a stereo pair. Anaglyph takes the left red channel and the
/// right green/blue channels; double vision averages; monocular passes one
/// view through unchanged.
PlanarImage compose(MixtureOperator op, const PlanarImage& left, const PlanarImage& right);

/// Max-abs per-sample difference between compose(op, left, right) and mixture.
double constraint_residual(MixtureOperator op, const PlanarImage& mixture,
                           const PlanarImage& left, const PlanarImage& right);

struct ProjectionResult {
    PlanarImage left;
    PlanarImage right;
    long clamped = 0;  // samples where the [lo,hi] box constraint was active
};

/// Least-squares projection of (left, right) onto the set of pairs that
/// compose exactly to the mixture while staying inside the image range.
/// Idempotent; the post-projection constraint residual is zero up to rounding.
ProjectionResult project(MixtureOperator op, const PlanarImage& mixture,
                         const PlanarImage& left, const PlanarImage& right);

}  // namespace unmix
