#include "doctest.h"

#include <cmath>

#include "sinrlab/grid.hpp"

using namespace sinrlab;

TEST_CASE("grid covers the default window around p_max") {
    DbGrid g = make_grid(-60.0);
    CHECK(g.min_db == doctest::Approx(-140.0));
    CHECK(g.max_db() == doctest::Approx(-20.0));
    CHECK(g.n == 1201);
}

TEST_CASE("halving the step doubles the node count") {
    DbGrid g = make_grid(-60.0, 80.0, 40.0, 0.05);
    CHECK(g.n == 2401);
}

TEST_CASE("small symmetric window") {
    DbGrid g = make_grid(0.0, 10.0, 10.0, 1.0);
    CHECK(g.n == 21);
    CHECK(g.value(10) == doctest::Approx(0.0));
}

TEST_CASE("off-lattice p_max still contains the requested window") {
    DbGrid g = make_grid(-59.9731, 80.0, 40.0, 0.1);
    CHECK(g.min_db <= -139.9731);
    CHECK(g.max_db() >= -19.9731);
    // nodes stay on the global lattice
    CHECK(std::abs(std::remainder(g.min_db, 0.1)) < 1e-9);
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(make_grid(0.0, -1.0, 40.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 80.0, 40.0, 0.0), std::invalid_argument);
}
