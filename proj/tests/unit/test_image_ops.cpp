#include <doctest.h>

#include "../support/synthetic.hpp"
#include "unmix/image_ops.hpp"

using namespace unmix;

TEST_SUITE("image_ops") {

TEST_CASE("gradients of a constant image are zero") {
    PlanarImage img(6, 5, 3, 0.37);
    PlanarImage gu = grad_u(img), gv = grad_v(img);
    for (double v : gu.data()) CHECK(v == 0.0);
    for (double v : gv.data()) CHECK(v == 0.0);
}

TEST_CASE("horizontal ramp has grad_u = 1/W off the last column") {
    const int w = 8, h = 4;
    PlanarImage img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<double>(x) / w;
    PlanarImage gu = grad_u(img);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w - 1; ++x)
            CHECK(gu.at(x, y) == doctest::Approx(1.0 / w).epsilon(1e-12));
        CHECK(gu.at(w - 1, y) == 0.0);
    }
}

TEST_CASE("gradients match an index-shift brute force on a random 5x5") {
    PlanarImage img = testing::random_image(21, 5, 5, 1);
    PlanarImage gu = grad_u(img), gv = grad_v(img);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            double eu = x + 1 < 5 ? img.at(x + 1, y) - img.at(x, y) : 0.0;
            double ev = y + 1 < 5 ? img.at(x, y + 1) - img.at(x, y) : 0.0;
            CHECK(gu.at(x, y) == eu);
            CHECK(gv.at(x, y) == ev);
        }
}

TEST_CASE("gradient linearity on [0,1] images") {
    PlanarImage a = testing::random_image(1, 8, 6, 3);
    PlanarImage b = testing::random_image(2, 8, 6, 3);
    PlanarImage sum(8, 6, 3, 0.0, ValueRange{0.0, 2.0});
    for (std::size_t i = 0; i < sum.sample_count(); ++i)
        sum.data()[i] = a.data()[i] + b.data()[i];
    PlanarImage gs = grad_u(sum), ga = grad_u(a), gb = grad_u(b);
    for (std::size_t i = 0; i < gs.sample_count(); ++i)
        CHECK(std::abs(gs.data()[i] - ga.data()[i] - gb.data()[i]) <= 1e-6);
}

TEST_CASE("downsample2: 2x2 box mean") {
    PlanarImage img(2, 2, 1);
    img.at(0, 1) = 1.0;
    img.at(1, 1) = 1.0;
    CHECK_THROWS(downsample2(img));  // images stay >= 2x2

    DisparityMap d(2, 2, 0.0);
    d.at(0, 1) = 1.0;
    d.at(1, 1) = 1.0;
    DisparityMap half = downsample2(d);
    REQUIRE(half.width == 1);
    // box mean 0.5, then the disparity value halves with the resolution
    CHECK(half.at(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("pyramid of a constant image is constant at every level") {
    PlanarImage img(16, 16, 3, 0.4);
    auto pyr = build_pyramid(img, 3);
    REQUIRE(pyr.size() == 3);
    for (const auto& level : pyr)
        for (double v : level.data()) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("level-1 pixel equals the mean of its 4 parents") {
    PlanarImage img = testing::random_image(5, 8, 8, 3);
    auto pyr = build_pyramid(img, 2);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                double mean = 0.25 * (img.at(2 * x, 2 * y, c) + img.at(2 * x + 1, 2 * y, c) +
                                      img.at(2 * x, 2 * y + 1, c) + img.at(2 * x + 1, 2 * y + 1, c));
                CHECK(pyr[1].at(x, y, c) == doctest::Approx(mean).epsilon(1e-12));
            }
}

TEST_CASE("build_pyramid(img, 1) returns the input unchanged") {
    PlanarImage img = testing::random_image(9, 6, 7, 3);
    auto pyr = build_pyramid(img, 1);
    REQUIRE(pyr.size() == 1);
    for (std::size_t i = 0; i < img.sample_count(); ++i)
        CHECK(pyr[0].data()[i] == img.data()[i]);
}

TEST_CASE("build_pyramid rejects images too small for the levels") {
    PlanarImage img(4, 4, 1, 0.5);
    CHECK_THROWS(build_pyramid(img, 3));
    CHECK_NOTHROW(build_pyramid(img, 2));
    CHECK_THROWS(build_pyramid(img, 0));
}

TEST_CASE("resize_bilinear doubles a constant image exactly") {
    PlanarImage img(4, 4, 1, 0.6);
    PlanarImage up = resize_bilinear(img, 8, 8);
    for (double v : up.data()) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("resize_disparity rescales values with width") {
    DisparityMap d(4, 4, 3.0);
    DisparityMap up = resize_disparity(d, 8, 8);
    for (double v : up.values) CHECK(v == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("flip_horizontal is an involution") {
    PlanarImage img = testing::random_image(3, 7, 5, 3);
    PlanarImage twice = flip_horizontal(flip_horizontal(img));
    for (std::size_t i = 0; i < img.sample_count(); ++i)
        CHECK(twice.data()[i] == img.data()[i]);
}

TEST_CASE("median3 removes an isolated spike") {
    DisparityMap d(5, 5, 2.0);
    d.at(2, 2) = 50.0;
    DisparityMap filtered = median3(d);
    CHECK(filtered.at(2, 2) == 2.0);
}

}  // TEST_SUITE
