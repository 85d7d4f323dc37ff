#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "sinrlab/convolve.hpp"
#include "sinrlab/model.hpp"
#include "sinrlab/montecarlo.hpp"

using namespace sinrlab;

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Hand-built omnidirectional ensemble (no deployment needed).
LinkEnsemble omni_ensemble(const std::vector<double>& means_dbm, double sigma_eff,
                           bool noise_enabled, double noise_mean, double noise_std,
                           double step = 0.1) {
    LinkEnsemble ens;
    ens.sigma_eff_db = sigma_eff;
    ens.noise_enabled = noise_enabled;
    ens.noise_mean_dbm = noise_mean;
    ens.noise_std_db = noise_std;
    double p_max = -1e300;
    for (double m : means_dbm) {
        LinkEnsemble::SiteLink link;
        link.mean_dbm = m;
        p_max = std::max(p_max, m);
        ens.links.push_back(link);
    }
    ens.p_max_dbm = p_max;
    ens.grid = make_grid(p_max, std::max(80.0, 7.0 * sigma_eff),
                         std::max(40.0, 5.0 * sigma_eff), step);
    return ens;
}

double sup_cdf_diff(const GriddedDist& a, const GriddedDist& b, double lo, double hi,
                    double step = 0.25) {
    double sup = 0.0;
    for (double x = lo; x <= hi; x += step)
        sup = std::max(sup, std::abs(cdf(a, x) - cdf(b, x)));
    return sup;
}

Deployment omni_deployment(const std::vector<Vec2>& positions, double tx_dbm = 49.0) {
    Deployment dep;
    for (const Vec2& p : positions) {
        Site site;
        site.position = p;
        Sector s;
        s.transmit_power_dbm = tx_dbm;
        s.antenna.kind = AntennaPattern::Kind::Omni;
        s.antenna.max_gain_dbi = 0.0;
        site.sectors = {s};
        dep.sites.push_back(site);
    }
    return dep;
}

}  // namespace

TEST_CASE("ensemble carries the decorrelated stds") {
    Deployment dep = omni_deployment({{0, 0}, {600, 0}});
    NoiseModel noise;

    ShadowingModel rho0{8.0, 0.0};
    LinkEnsemble e0 = build_link_ensemble(dep, rho0, noise, {200, 0});
    CHECK(e0.sigma_eff_db == doctest::Approx(8.0));
    CHECK(e0.noise_std_db == doctest::Approx(0.0));

    ShadowingModel rho1{8.0, 1.0};
    LinkEnsemble e1 = build_link_ensemble(dep, rho1, noise, {200, 0});
    CHECK(e1.sigma_eff_db == doctest::Approx(0.0));
    CHECK(e1.noise_std_db == doctest::Approx(8.0));

    ShadowingModel rho05{8.0, 0.5};
    LinkEnsemble e05 = build_link_ensemble(dep, rho05, noise, {200, 0});
    CHECK(e05.sigma_eff_db == doctest::Approx(8.0 / std::sqrt(2.0)));
    CHECK(e05.noise_std_db == doctest::Approx(8.0 / std::sqrt(2.0)));

    // means and the grid anchor
    CHECK(e05.links[0].mean_dbm == doctest::Approx(49.0 - path_loss_db(dep.propagation, 200.0)));
    CHECK(e05.p_max_dbm == doctest::Approx(e05.links[0].mean_dbm));
    CHECK(e05.grid.min_db <= e05.p_max_dbm - 80.0 + 1e-9);
    CHECK(e05.grid.max_db() >= e05.p_max_dbm + 40.0 - 1e-9);
}

TEST_CASE("noise power follows thermal density, bandwidth and figure") {
    NoiseModel n;
    CHECK(n.power_dbm(20.0e6) == doctest::Approx(-174.0 + 10.0 * std::log10(20.0e6) + 9.0));
}

TEST_CASE("association weight of a single link is the link density") {
    LinkEnsemble ens = omni_ensemble({-70.0}, 5.657, true, -92.0, 5.657);
    const double x = -72.3;
    const double want = std::exp(-0.5 * std::pow((x + 70.0) / 5.657, 2)) /
                        (5.657 * std::sqrt(2.0 * M_PI));
    CHECK(association_weight_density(ens, 0, x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("association weights of identical links split evenly") {
    LinkEnsemble ens = omni_ensemble({-70.0, -70.0}, 5.657, true, -92.0, 5.657);
    double w0 = 0.0, w1 = 0.0;
    for (int k = 0; k < ens.grid.n; ++k) {
        const double x = ens.grid.value(k);
        w0 += association_weight_density(ens, 0, x) * ens.grid.step_db;
        w1 += association_weight_density(ens, 1, x) * ens.grid.step_db;
    }
    CHECK(w0 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(w1 == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("a 20 dB advantage wins with the closed-form probability") {
    const double sigma = 8.0 / std::sqrt(2.0);  // sqrt(2)*sigma = 8
    LinkEnsemble ens = omni_ensemble({-60.0, -80.0}, sigma, true, -100.0, sigma);
    double w0 = 0.0;
    for (int k = 0; k < ens.grid.n; ++k)
        w0 += association_weight_density(ens, 0, ens.grid.value(k)) * ens.grid.step_db;
    CHECK(w0 == doctest::Approx(phi(2.5)).epsilon(1e-3));
}

TEST_CASE("interference pdf with one site is the noise alone") {
    LinkEnsemble ens = omni_ensemble({-70.0}, 8.0, true, -95.0, 0.0);  // rho = 0
    GriddedDist d = interference_noise_pdf(ens, 0, -70.0);
    CHECK(d.is_point());
    CHECK(d.point_db == doctest::Approx(-95.0));
}

TEST_CASE("a deterministic interferer 30 dB below the serving power") {
    LinkEnsemble ens = omni_ensemble({-60.0, -90.0}, 0.0, false, 0.0, 0.0);
    GriddedDist d = interference_noise_pdf(ens, 0, -60.0);
    CHECK(d.is_point());
    CHECK(d.point_db == doctest::Approx(-90.0));
}

TEST_CASE("conditional interference matches a rejection-sampling oracle") {
    const double sigma = 5.657;
    const std::vector<double> means = {-70.0, -74.0, -78.0};
    const double noise_mean = -88.0, noise_std = 5.657;
    LinkEnsemble ens = omni_ensemble(means, sigma, true, noise_mean, noise_std);
    const double p_s = -68.0;
    GriddedDist model = interference_noise_pdf(ens, 0, p_s);
    CHECK(model.mass == doctest::Approx(1.0).epsilon(1e-3));

    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    std::vector<double> accepted;
    accepted.reserve(1'000'000);
    while (accepted.size() < 1'000'000) {
        const double p1 = means[1] + sigma * nd(rng);
        const double p2 = means[2] + sigma * nd(rng);
        if (p1 > p_s || p2 > p_s) continue;
        const double nz = noise_mean + noise_std * nd(rng);
        accepted.push_back(10.0 * std::log10(std::pow(10.0, p1 / 10.0) +
                                             std::pow(10.0, p2 / 10.0) +
                                             std::pow(10.0, nz / 10.0)));
    }
    std::sort(accepted.begin(), accepted.end());
    CHECK(ks_distance(accepted, model) < 0.005);
}

TEST_CASE("single-link conditional SINR is the shifted link density") {
    LinkEnsemble ens = omni_ensemble({-70.0}, 5.0, true, -95.0, 0.0);
    GriddedDist h = conditional_sinr_dist(ens, 0);
    CHECK(h.mass == doctest::Approx(1.0).epsilon(1e-3));
    GriddedDist ref = gaussian_on_grid(make_grid(65.0), 25.0, 5.0);
    CHECK(sup_cdf_diff(h, ref, 5.0, 45.0) < 1e-3);
}

TEST_CASE("a hopeless site yields the zero distribution") {
    LinkEnsemble ens = omni_ensemble({-60.0, -130.0}, 5.657, true, -100.0, 5.657);
    CHECK(conditional_sinr_dist(ens, 1).is_zero());
}

TEST_CASE("symmetric pair splits the conditional mass") {
    LinkEnsemble ens = omni_ensemble({-70.0, -70.0}, 5.657, true, -92.0, 5.657);
    GriddedDist h0 = conditional_sinr_dist(ens, 0);
    GriddedDist h1 = conditional_sinr_dist(ens, 1);
    CHECK(h0.mass == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(h1.mass == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(sup_cdf_diff(h0, h1, -20.0, 40.0) < 1e-9);
}

TEST_CASE("best server of one site equals its conditional distribution") {
    LinkEnsemble ens = omni_ensemble({-70.0}, 5.0, true, -95.0, 5.0);
    SinrDistribution bs = sinr_best_server(ens);
    GriddedDist h = conditional_sinr_dist(ens, 0);
    CHECK(bs.dist.mass == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(sup_cdf_diff(bs.dist, h, 0.0, 50.0) < 1e-9);
}

TEST_CASE("two symmetric sites without noise keep the SINR nonnegative") {
    LinkEnsemble ens = omni_ensemble({-70.0, -70.0}, 5.657, false, 0.0, 0.0);
    SinrDistribution bs = sinr_best_server(ens);
    CHECK(bs.dist.mass == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cdf(bs.dist, -0.5) < 1e-6);
    // closed form: SINR dB = |P1 - P2|, folded normal with scale sqrt(2)*sigma
    for (double x : {2.0, 5.0, 10.0, 20.0}) {
        const double want = 2.0 * phi(x / 8.0) - 1.0;
        CHECK(cdf(bs.dist, x) == doctest::Approx(want).epsilon(2e-3));
    }
    CHECK(bs.assoc_prob.sum() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("best-server mixture sums the conditionals") {
    LinkEnsemble ens = omni_ensemble({-70.0, -75.0, -81.0}, 5.657, true, -93.0, 5.657);
    SinrDistribution bs = sinr_best_server(ens);
    CHECK(bs.dist.mass == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(bs.assoc_prob.sum() == doctest::Approx(1.0).epsilon(1e-3));
    double mass_sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        GriddedDist h = conditional_sinr_dist(ens, i);
        mass_sum += h.mass;
        CHECK(h.mass == doctest::Approx(bs.assoc_prob[i]).epsilon(2e-3));
    }
    CHECK(mass_sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("best server stochastically dominates any fixed association") {
    LinkEnsemble ens = omni_ensemble({-68.0, -72.0, -77.0}, 5.657, true, -90.0, 5.657);
    SinrDistribution bs = sinr_best_server(ens);
    for (int i = 0; i < 3; ++i) {
        SinrDistribution fx = sinr_fixed_association(ens, AssociationMode::FixedSite, i);
        for (double x = -30.0; x <= 40.0; x += 0.5)
            CHECK(cdf(bs.dist, x) <= cdf(fx.dist, x) + 2e-3);
    }
}

TEST_CASE("common power offset cancels without noise") {
    LinkEnsemble a = omni_ensemble({-70.0, -74.0, -79.0}, 5.657, false, 0.0, 0.0);
    LinkEnsemble b = omni_ensemble({-60.0, -64.0, -69.0}, 5.657, false, 0.0, 0.0);
    SinrDistribution da = sinr_best_server(a);
    SinrDistribution db = sinr_best_server(b);
    CHECK(sup_cdf_diff(da.dist, db.dist, -20.0, 40.0) < 1e-3);
}

TEST_CASE("best server against the direct sampler") {
    Deployment dep = omni_deployment({{0, 0}, {500, 0}, {250, 433}});
    ShadowingModel shadowing{8.0, 0.5};
    NoiseModel noise;
    const Vec2 ue{180.0, 140.0};
    LinkEnsemble ens = build_link_ensemble(dep, shadowing, noise, ue);
    SinrDistribution model = sinr_best_server(ens);

    SimConfig sim;
    sim.num_samples = 300'000;
    sim.rng_seed = 4242;
    EmpiricalCdf emp = run(sim, dep, shadowing, noise, ue);
    CHECK(ks_distance(emp, model) < 0.01);

    // association split against the model weights
    Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(3);
    for (int s : emp.serving) counts[s] += 1.0;
    counts /= static_cast<double>(emp.serving.size());
    for (int i = 0; i < 3; ++i)
        CHECK(counts[i] == doctest::Approx(model.assoc_prob[i]).epsilon(0.02));
}

TEST_CASE("deterministic shadowing collapses to point SINR") {
    LinkEnsemble ens = omni_ensemble({-60.0, -70.0}, 0.0, false, 0.0, 0.0);
    SinrDistribution bs = sinr_best_server(ens);
    CHECK(bs.dist.is_point());
    CHECK(bs.dist.point_db == doctest::Approx(10.0));
    CHECK(bs.assoc_prob[0] == doctest::Approx(1.0));
}

TEST_CASE("fixed association with rho=1 subtracts the noise variable") {
    // sigma_eff = 0 but the noise keeps the full std: SINR is gaussian.
    LinkEnsemble ens = omni_ensemble({-60.0}, 0.0, true, -90.0, 8.0);
    SinrDistribution fx = sinr_fixed_association(ens, AssociationMode::FixedSite, 0);
    GriddedDist ref = gaussian_on_grid(make_grid(70.0), 30.0, 8.0);
    CHECK(sup_cdf_diff(fx.dist, ref, 0.0, 60.0) < 2e-3);
}

TEST_CASE("distance tie breaks to the lowest index") {
    Deployment dep = omni_deployment({{-300, 0}, {300, 0}});
    ShadowingModel shadowing{8.0, 0.5};
    NoiseModel noise;
    LinkEnsemble ens = build_link_ensemble(dep, shadowing, noise, {0, 0});
    SinrDistribution fx = sinr_fixed_association(ens, AssociationMode::ShortestDistance);
    CHECK(fx.assoc_prob[0] == doctest::Approx(1.0));
}

TEST_CASE("fixed association matches a forced-association sampler") {
    Deployment dep = omni_deployment({{0, 0}, {400, 0}});
    ShadowingModel shadowing{8.0, 0.5};
    NoiseModel noise;
    const Vec2 ue{150.0, 60.0};
    LinkEnsemble ens = build_link_ensemble(dep, shadowing, noise, ue);
    SinrDistribution model = sinr_fixed_association(ens, AssociationMode::FixedSite, 1);

    SimConfig sim;
    sim.num_samples = 300'000;
    sim.rng_seed = 7;
    sim.mode = AssociationMode::FixedSite;
    sim.fixed_site = 1;
    EmpiricalCdf emp = run(sim, dep, shadowing, noise, ue);
    CHECK(ks_distance(emp, model) < 0.01);
}

TEST_CASE("empty denominator configurations are rejected") {
    LinkEnsemble ens = omni_ensemble({-70.0}, 5.0, false, 0.0, 0.0);
    CHECK_THROWS_AS((void)sinr_best_server(ens), numerical_error);
    CHECK_THROWS_AS((void)interference_noise_pdf(ens, 0, -70.0), numerical_error);
}

TEST_CASE("area guards degenerate inputs") {
    AreaSpec bad;
    bad.polygon = {{0, 0}, {10, 0}};
    CHECK_THROWS_AS(area_grid_points(bad), std::invalid_argument);
    AreaSpec flat;
    flat.polygon = {{0, 0}, {10, 0}, {20, 0}};
    CHECK_THROWS_AS(area_grid_points(flat), std::invalid_argument);
    AreaSpec tiny;
    tiny.polygon = {{0, 0}, {1, 0}, {0.5, 1}};
    tiny.spacing_m = 50.0;
    CHECK_THROWS_AS(area_grid_points(tiny), std::invalid_argument);
}

TEST_CASE("an area holding a single lattice point equals that location") {
    Deployment dep = omni_deployment({{0, 0}, {500, 0}});
    ShadowingModel shadowing{8.0, 0.5};
    NoiseModel noise;
    AreaSpec area;
    area.polygon = {{120, 120}, {129, 120}, {129, 129}, {120, 129}};
    area.spacing_m = 10.0;
    const std::vector<Vec2> pts = area_grid_points(area);
    REQUIRE(pts.size() == 1);
    SinrDistribution mix = area_sinr(dep, shadowing, noise, area);
    LinkEnsemble ens = build_link_ensemble(dep, shadowing, noise, pts[0]);
    SinrDistribution one = sinr_best_server(ens);
    CHECK(sup_cdf_diff(mix.dist, one.dist, -20.0, 40.0) < 1e-9);
    CHECK(mix.dist.mass == doctest::Approx(1.0).epsilon(1e-3));
}
