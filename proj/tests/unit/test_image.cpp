#include <doctest.h>

#include "unmix/image.hpp"

using namespace unmix;

TEST_SUITE("image") {

TEST_CASE("constructor validates dimensions and channels") {
    CHECK_THROWS(PlanarImage(1, 5, 3));
    CHECK_THROWS(PlanarImage(5, 1, 3));
    CHECK_THROWS(PlanarImage(5, 5, 2));
    CHECK_THROWS(PlanarImage(5, 5, 0));
    CHECK_NOTHROW(PlanarImage(2, 2, 1));
}

TEST_CASE("samples stay inside the declared range") {
    PlanarImage img(4, 4, 1, 7.0);  // fill clamped to default [0,1]
    for (double v : img.data()) CHECK(v == 1.0);

    std::vector<double> samples(4 * 4, -3.0);
    samples[5] = 0.25;
    PlanarImage from = PlanarImage::from_data(4, 4, 1, samples);
    CHECK(from.at(0, 0) == 0.0);
    CHECK(from.at(1, 1) == 0.25);
}

TEST_CASE("from_data rejects wrong buffer size") {
    CHECK_THROWS(PlanarImage::from_data(4, 4, 3, std::vector<double>(10)));
}

TEST_CASE("planar layout: plane pointers do not overlap") {
    PlanarImage img(3, 2, 3);
    img.at(2, 1, 0) = 0.5;
    img.at(2, 1, 2) = 0.75;
    CHECK(img.plane(0)[5] == 0.5);
    CHECK(img.plane(2)[5] == 0.75);
    CHECK(img.plane(1)[5] == 0.0);
}

TEST_CASE("disparity map validity defaults to true") {
    DisparityMap d(3, 3, 2.0);
    CHECK(d.is_valid(1, 1));
    d.set_valid(1, 1, false);
    CHECK_FALSE(d.is_valid(1, 1));
    CHECK(d.at(2, 2) == 2.0);
}

}  // TEST_SUITE
