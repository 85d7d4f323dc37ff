#include "doctest.h"

#include <cmath>
#include <sstream>

#include "sinrlab/dist.hpp"

using namespace sinrlab;

namespace {
const DbGrid kGrid = make_grid(-60.0);
}

TEST_CASE("gaussian density peaks at the normal value") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 8.0);
    CHECK(d.density.maxCoeff() ==
          doctest::Approx(1.0 / (8.0 * std::sqrt(2.0 * M_PI))).epsilon(1e-4));
    CHECK(d.mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero std degenerates to a point mass") {
    GriddedDist d = gaussian_on_grid(kGrid, -92.0, 0.0);
    CHECK(d.is_point());
    CHECK(d.point_db == doctest::Approx(-92.0));
}

TEST_CASE("renormalization yields unit trapezoidal mass") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 5.657);
    CHECK(std::abs(d.mass - 1.0) < 1e-9);
}

TEST_CASE("mean far outside the grid is rejected") {
    CHECK_THROWS_AS(gaussian_on_grid(kGrid, -20.0 + 90.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_on_grid(kGrid, -300.0, 8.0), std::invalid_argument);
}

TEST_CASE("cdf at the mean is one half") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 8.0);
    CHECK(cdf(d, -80.0) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("cdf below the grid is zero") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 8.0);
    CHECK(cdf(d, -200.0) == 0.0);
}

TEST_CASE("cdf one sigma above the mean matches the normal table") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 8.0);
    CHECK(cdf(d, -72.0) == doctest::Approx(0.8413447460685429).epsilon(1e-3));
}

TEST_CASE("cdf is nondecreasing") {
    GriddedDist d = gaussian_on_grid(kGrid, -75.0, 6.0);
    double prev = -1.0;
    for (int i = 0; i < kGrid.n; i += 7) {
        const double c = cdf(d, kGrid.value(i));
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("quantile inverts the cdf") {
    GriddedDist d = gaussian_on_grid(make_grid(40.0), 0.0, 8.0);
    CHECK(quantile(d, 0.5) == doctest::Approx(0.0).epsilon(0.05));
    // 2-sigma quantile
    CHECK(quantile(d, 0.022750131948179195) == doctest::Approx(-16.0).epsilon(0.01));
    CHECK_THROWS_AS(quantile(d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quantile(d, 1.5), std::invalid_argument);
}

TEST_CASE("truncation above the support leaves the distribution unchanged") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 8.0);
    GriddedDist t = truncate_above(d, -10.0);
    CHECK(t.mass == doctest::Approx(d.mass));
    CHECK(t.hi == d.hi);
}

TEST_CASE("normalized truncation at the mean doubles the peak") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 6.0);
    GriddedDist t = truncate_above_normalized(d, -80.0);
    CHECK(t.density[kGrid.clamp_index(-80.0)] ==
          doctest::Approx(2.0 / (6.0 * std::sqrt(2.0 * M_PI))).epsilon(1e-3));
    CHECK(t.mass == doctest::Approx(1.0));
}

TEST_CASE("unnormalized truncation mass equals the cdf at the cut") {
    GriddedDist d = gaussian_on_grid(kGrid, -80.0, 8.0);
    for (double cut : {-95.0, -85.0, -77.7, -60.0}) {
        GriddedDist t = truncate_above(d, cut);
        const int k = static_cast<int>(std::floor(kGrid.position(cut) + 1e-9));
        Eigen::ArrayXd cum = cumulative_trapezoid(d);
        CHECK(t.mass == doctest::Approx(cum[k]).epsilon(1e-12));
    }
}

TEST_CASE("point mass entirely above the cut truncates to zero") {
    GriddedDist p = GriddedDist::point_mass(-70.0);
    CHECK(truncate_above(p, -80.0).is_zero());
    CHECK(!truncate_above(p, -60.0).is_zero());
}

TEST_CASE("csv dumps carry header and data rows") {
    GriddedDist d = gaussian_on_grid(make_grid(0.0, 10.0, 10.0, 1.0), 0.0, 3.0);
    std::ostringstream os1, os2;
    dump_density_csv(d, os1);
    dump_cdf_csv(d, os2);
    CHECK(os1.str().rfind("x_db,density\n", 0) == 0);
    CHECK(os2.str().rfind("x_db,cdf\n", 0) == 0);
    CHECK(std::count(os1.str().begin(), os1.str().end(), '\n') > 10);
}

TEST_CASE("grid refinement changes cdf values by less than 5e-4") {
    GriddedDist coarse = gaussian_on_grid(make_grid(-60.0, 80.0, 40.0, 0.1), -85.0, 5.657);
    GriddedDist fine = gaussian_on_grid(make_grid(-60.0, 80.0, 40.0, 0.05), -85.0, 5.657);
    double sup = 0.0;
    for (double x = -120.0; x <= -50.0; x += 0.5)
        sup = std::max(sup, std::abs(cdf(coarse, x) - cdf(fine, x)));
    CHECK(sup < 5e-4);
}
