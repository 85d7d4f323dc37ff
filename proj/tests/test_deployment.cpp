#include "doctest.h"

#include <cmath>
#include <random>

#include "sinrlab/deployment.hpp"

using namespace sinrlab;

namespace {

Sector omni_sector(double power_dbm = 49.0, double gain_dbi = 0.0) {
    Sector s;
    s.transmit_power_dbm = power_dbm;
    s.antenna.kind = AntennaPattern::Kind::Omni;
    s.antenna.max_gain_dbi = gain_dbi;
    return s;
}

Sector sector3d(double power_dbm = 49.0) {
    Sector s;
    s.transmit_power_dbm = power_dbm;
    s.antenna.kind = AntennaPattern::Kind::Sector3d;
    return s;
}

}  // namespace

TEST_CASE("path loss reproduces the log-distance line") {
    PropagationModel m;
    CHECK(path_loss_db(m, 1000.0) == doctest::Approx(128.1));
    CHECK(path_loss_db(m, 100.0) == doctest::Approx(90.5));
    CHECK(path_loss_db(m, 500.0) == doctest::Approx(116.7812722).epsilon(1e-6));
}

TEST_CASE("path loss rejects non-positive distance when the clamp is off") {
    PropagationModel m;
    m.min_distance_m = 0.0;
    CHECK_THROWS_AS(path_loss_db(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(m, -5.0), std::invalid_argument);
}

TEST_CASE("minimum-distance clamp flattens the curve near the site") {
    PropagationModel m;
    CHECK(path_loss_db(m, 1.0) == path_loss_db(m, 35.0));
    CHECK(path_loss_db(m, 36.0) > path_loss_db(m, 35.0));
}

TEST_CASE("path loss increases with distance") {
    PropagationModel m;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(40.0, 5000.0);
    for (int i = 0; i < 200; ++i) {
        double a = d(rng), b = d(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-6) continue;
        CHECK(path_loss_db(m, a) < path_loss_db(m, b));
    }
}

TEST_CASE("omni gain is direction independent") {
    AntennaPattern p;
    p.kind = AntennaPattern::Kind::Omni;
    p.max_gain_dbi = 14.0;
    CHECK(antenna_gain_db(p, {0, 0}, {100, 50}) == doctest::Approx(14.0));
    CHECK(antenna_gain_db(p, {0, 0}, {-3, -900}) == doctest::Approx(14.0));
}

TEST_CASE("sector gain peaks on boresight at the tilt distance") {
    AntennaPattern p;
    p.kind = AntennaPattern::Kind::Sector3d;
    p.boresight_azimuth_deg = 30.0;
    // depression angle equals the downtilt at d = (h_bs - h_ue) / tan(tilt)
    const double d = (p.bs_height_m - p.ue_height_m) / std::tan(p.downtilt_deg * M_PI / 180.0);
    const Vec2 ue{d * std::cos(30.0 * M_PI / 180.0), d * std::sin(30.0 * M_PI / 180.0)};
    CHECK(antenna_gain_db(p, {0, 0}, ue) == doctest::Approx(p.max_gain_dbi).epsilon(1e-9));
}

TEST_CASE("gain at the back of the sector sits at the attenuation floor") {
    AntennaPattern p;
    p.kind = AntennaPattern::Kind::Sector3d;
    p.boresight_azimuth_deg = 0.0;
    const double d = (p.bs_height_m - p.ue_height_m) / std::tan(p.downtilt_deg * M_PI / 180.0);
    CHECK(antenna_gain_db(p, {0, 0}, {-d, 0}) ==
          doctest::Approx(p.max_gain_dbi - p.max_attenuation_db));
}

TEST_CASE("gain stays within the attenuation window") {
    AntennaPattern p;
    p.kind = AntennaPattern::Kind::Sector3d;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-2000.0, 2000.0);
    for (int i = 0; i < 300; ++i) {
        const double g = antenna_gain_db(p, {0, 0}, {coord(rng), coord(rng)});
        CHECK(g <= p.max_gain_dbi + 1e-12);
        CHECK(g >= p.max_gain_dbi - p.max_attenuation_db - 1e-12);
    }
}

TEST_CASE("mean receive power composes budget terms") {
    Deployment dep;
    Site site;
    site.position = {0, 0};
    site.sectors = {omni_sector(49.0, 0.0)};
    dep.sites = {site};
    CHECK(mean_rx_power_dbm(dep, {1000, 0}, 0, 0) == doctest::Approx(-79.1));

    dep.sites[0].sectors[0].transmit_power_dbm += 3.0103;
    CHECK(mean_rx_power_dbm(dep, {1000, 0}, 0, 0) == doctest::Approx(-79.1 + 3.0103));

    dep.sites[0].sectors[0].transmit_power_dbm = 49.0;
    dep.sites[0].sectors[0].antenna.max_gain_dbi = 14.0;
    CHECK(mean_rx_power_dbm(dep, {1000, 0}, 0, 0) == doctest::Approx(-79.1 + 14.0));
}

TEST_CASE("mean power is invariant under rigid motion") {
    Deployment dep = build_hex_grid(1, 500.0, sector3d(), 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-400.0, 400.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 ue{u(rng), u(rng)};
        const double angle = u(rng) / 100.0;
        const Vec2 shift{u(rng), u(rng)};
        Deployment moved = dep;
        auto rot = [&](const Vec2& v) {
            return Vec2{v.x * std::cos(angle) - v.y * std::sin(angle) + shift.x,
                        v.x * std::sin(angle) + v.y * std::cos(angle) + shift.y};
        };
        for (auto& s : moved.sites) {
            s.position = rot(s.position);
            for (auto& sec : s.sectors)
                sec.antenna.boresight_azimuth_deg += angle * 180.0 / M_PI;
        }
        const Vec2 ue2 = rot(ue);
        for (int j = 0; j < 7; ++j)
            for (int s = 0; s < 3; ++s)
                CHECK(mean_rx_power_dbm(dep, ue, j, s) ==
                      doctest::Approx(mean_rx_power_dbm(moved, ue2, j, s)).epsilon(1e-9));
    }
}

TEST_CASE("strongest sector matches exhaustive search") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-800.0, 800.0);
    Deployment dep;
    Site site;
    site.position = {0, 0};
    site.sectors = {sector3d(), sector3d(), sector3d()};
    site.sectors[0].antenna.boresight_azimuth_deg = 30.0;
    site.sectors[1].antenna.boresight_azimuth_deg = 150.0;
    site.sectors[2].antenna.boresight_azimuth_deg = 270.0;
    dep.sites = {site};
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 ue{u(rng), u(rng)};
        const int got = strongest_sector(dep, ue, 0);
        int want = 0;
        for (int s = 1; s < 3; ++s)
            if (mean_rx_power_dbm(dep, ue, 0, s) > mean_rx_power_dbm(dep, ue, 0, want)) want = s;
        CHECK(got == want);
    }
}

TEST_CASE("single-sector site reports index zero and zero gsec") {
    Deployment dep;
    Site site;
    site.position = {0, 0};
    site.sectors = {omni_sector()};
    dep.sites = {site};
    CHECK(strongest_sector(dep, {100, 100}, 0) == 0);
    CHECK(site_gsec_db(dep, {100, 100}, 0) == doctest::Approx(0.0));
}

TEST_CASE("equal-gain sectors give gsec of 10log10(3)") {
    Deployment dep;
    Site site;
    site.position = {0, 0};
    site.sectors = {omni_sector(), omni_sector(), omni_sector()};
    dep.sites = {site};
    CHECK(site_gsec_db(dep, {200, 0}, 0) == doctest::Approx(10.0 * std::log10(3.0)));
}

TEST_CASE("gsec equals the direct linear-domain sum") {
    Deployment dep = build_hex_grid(0, 500.0, sector3d(), 3);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-700.0, 700.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 ue{u(rng), u(rng)};
        const int s_star = strongest_sector(dep, ue, 0);
        double sum = 1.0;
        for (int s = 0; s < 3; ++s) {
            if (s == s_star) continue;
            sum += std::pow(10.0, 0.1 * (mean_rx_power_dbm(dep, ue, 0, s) -
                                         mean_rx_power_dbm(dep, ue, 0, s_star)));
        }
        CHECK(site_gsec_db(dep, ue, 0) == doctest::Approx(10.0 * std::log10(sum)).epsilon(1e-9));
        CHECK(site_gsec_db(dep, ue, 0) >= 0.0);
    }
}

TEST_CASE("hex grid ring counts") {
    CHECK(build_hex_grid(0, 500.0, omni_sector(), 1).sites.size() == 1);
    Deployment one = build_hex_grid(1, 500.0, omni_sector(), 1);
    CHECK(one.sites.size() == 7);
    int at_isd = 0;
    for (int j = 1; j < 7; ++j) {
        const double d = std::hypot(one.sites[j].position.x, one.sites[j].position.y);
        if (std::abs(d - 500.0) < 1e-6) ++at_isd;
    }
    CHECK(at_isd == 6);
    CHECK(build_hex_grid(2, 500.0, omni_sector(), 1).sites.size() == 19);
}

TEST_CASE("the bundled 12-site preset has 12 three-sector sites") {
    Paper12Layout layout = build_paper12(500.0, sector3d(), 3);
    CHECK(layout.deployment.sites.size() == 12);
    for (const auto& s : layout.deployment.sites) CHECK(s.sectors.size() == 3);
    CHECK(layout.triangle.size() == 3);
    // equilateral inner triangle with side ISD
    for (int i = 0; i < 3; ++i) {
        const Vec2& a = layout.triangle[i];
        const Vec2& b = layout.triangle[(i + 1) % 3];
        CHECK(std::hypot(a.x - b.x, a.y - b.y) == doctest::Approx(500.0));
    }
}

TEST_CASE("invalid grid arguments are rejected") {
    CHECK_THROWS_AS(build_hex_grid(-1, 500.0, omni_sector(), 1), std::invalid_argument);
    CHECK_THROWS_AS(build_hex_grid(1, 0.0, omni_sector(), 1), std::invalid_argument);
    CHECK_THROWS_AS(build_hex_grid(1, 500.0, omni_sector(), 2), std::invalid_argument);
}
