#include "sinrlab/deployment.hpp"

#include <cmath>
#include <stdexcept>

namespace sinrlab {

namespace {

double wrap180(double deg) {
    double d = std::fmod(deg + 180.0, 360.0);
    if (d < 0.0) d += 360.0;
    return d - 180.0;
}

double pattern_attenuation_db(const AntennaPattern& p, const Vec2& sector_pos,
                              const Vec2& ue_pos) {
    const double dx = ue_pos.x - sector_pos.x;
    const double dy = ue_pos.y - sector_pos.y;
    const double dist = std::hypot(dx, dy);
    const double az = std::atan2(dy, dx) * 180.0 / M_PI;
    const double dphi = wrap180(az - p.boresight_azimuth_deg);
    const double a_h = -std::min(
        12.0 * (dphi / p.horizontal_3db_beamwidth_deg) * (dphi / p.horizontal_3db_beamwidth_deg),
        p.max_attenuation_db);
    // Depression angle, positive downward.
    const double theta = std::atan2(p.bs_height_m - p.ue_height_m, dist) * 180.0 / M_PI;
    const double dtheta = theta - p.downtilt_deg;
    const double a_v = -std::min(
        12.0 * (dtheta / p.vertical_3db_beamwidth_deg) * (dtheta / p.vertical_3db_beamwidth_deg),
        p.sidelobe_attenuation_db);
    return std::max(a_h + a_v, -p.max_attenuation_db);
}

}  // namespace

double path_loss_db(const PropagationModel& model, double distance_m) {
    double d = distance_m;
    if (model.min_distance_m > 0.0 && d < model.min_distance_m) d = model.min_distance_m;
    if (!(d > 0.0)) throw std::invalid_argument("path_loss_db: non-positive distance");
    const double d_km = d / 1000.0;
    return model.pathloss_intercept_db +
           model.pathloss_exponent_coeff * std::log10(d_km / model.reference_distance_km);
}

double antenna_gain_db(const AntennaPattern& pattern, const Vec2& sector_pos,
                       const Vec2& ue_pos) {
    if (pattern.kind == AntennaPattern::Kind::Omni) return pattern.max_gain_dbi;
    return pattern.max_gain_dbi + pattern_attenuation_db(pattern, sector_pos, ue_pos);
}

double mean_rx_power_dbm(const Deployment& dep, const Vec2& ue_pos, int site_index,
                         int sector_index) {
    const Site& site = dep.sites.at(site_index);
    const Sector& sec = site.sectors.at(sector_index);
    const double dist = std::hypot(ue_pos.x - site.position.x, ue_pos.y - site.position.y);
    return sec.transmit_power_dbm + antenna_gain_db(sec.antenna, site.position, ue_pos) +
           dep.ue_antenna_gain_dbi - path_loss_db(dep.propagation, dist);
}

int strongest_sector(const Deployment& dep, const Vec2& ue_pos, int site_index) {
    const Site& site = dep.sites.at(site_index);
    int best = 0;
    double best_p = -1e300;
    for (int s = 0; s < static_cast<int>(site.sectors.size()); ++s) {
        const double p = mean_rx_power_dbm(dep, ue_pos, site_index, s);
        if (p > best_p) {
            best_p = p;
            best = s;
        }
    }
    return best;
}

double site_weaker_sector_ratio(const Deployment& dep, const Vec2& ue_pos, int site_index) {
    const Site& site = dep.sites.at(site_index);
    if (site.sectors.size() <= 1) return 0.0;
    const int s_star = strongest_sector(dep, ue_pos, site_index);
    // Ratios of full mean powers, so per-sector transmit power differences
    // are included alongside the pattern gains.
    const double p_star = mean_rx_power_dbm(dep, ue_pos, site_index, s_star);
    double ratio = 0.0;
    for (int s = 0; s < static_cast<int>(site.sectors.size()); ++s) {
        if (s == s_star) continue;
        ratio += std::pow(10.0, 0.1 * (mean_rx_power_dbm(dep, ue_pos, site_index, s) - p_star));
    }
    return ratio;
}

double site_gsec_db(const Deployment& dep, const Vec2& ue_pos, int site_index) {
    return 10.0 * std::log10(1.0 + site_weaker_sector_ratio(dep, ue_pos, site_index));
}

namespace {

std::vector<Sector> make_sectors(const Sector& tmpl, int sectors_per_site,
                                 double boresight_offset_deg) {
    if (sectors_per_site != 1 && sectors_per_site != 3)
        throw std::invalid_argument("sectors_per_site must be 1 or 3");
    std::vector<Sector> sectors;
    for (int k = 0; k < sectors_per_site; ++k) {
        Sector s = tmpl;
        s.antenna.boresight_azimuth_deg = boresight_offset_deg + k * 360.0 / sectors_per_site;
        sectors.push_back(s);
    }
    return sectors;
}

}  // namespace

Deployment build_hex_grid(int num_rings, double inter_site_distance_m,
                          const Sector& sector_template, int sectors_per_site,
                          double boresight_offset_deg) {
    if (num_rings < 0) throw std::invalid_argument("build_hex_grid: negative ring count");
    if (!(inter_site_distance_m > 0.0))
        throw std::invalid_argument("build_hex_grid: non-positive ISD");
    const double a = inter_site_distance_m;
    const Vec2 u1{a, 0.0};
    const Vec2 u2{0.5 * a, 0.5 * std::sqrt(3.0) * a};
    Deployment dep;
    auto add_site = [&](int i, int j) {
        Site site;
        site.position = {i * u1.x + j * u2.x, i * u1.y + j * u2.y};
        site.sectors = make_sectors(sector_template, sectors_per_site, boresight_offset_deg);
        dep.sites.push_back(site);
    };
    add_site(0, 0);
    for (int r = 1; r <= num_rings; ++r) {
        // Walk the hexagonal ring of radius r.
        int i = r, j = 0;
        const int di[6] = {-1, -1, 0, 1, 1, 0};
        const int dj[6] = {1, 0, -1, -1, 0, 1};
        for (int side = 0; side < 6; ++side)
            for (int step = 0; step < r; ++step) {
                add_site(i, j);
                i += di[side];
                j += dj[side];
            }
    }
    return dep;
}

Paper12Layout build_paper12(double inter_site_distance_m, const Sector& sector_template,
                            int sectors_per_site, double boresight_offset_deg) {
    if (!(inter_site_distance_m > 0.0))
        throw std::invalid_argument("build_paper12: non-positive ISD");
    const double a = inter_site_distance_m;
    const double h = 0.5 * std::sqrt(3.0) * a;
    Paper12Layout out;
    // Three lattice rows of four sites, middle row offset by half an ISD.
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 4; ++col) {
            Site site;
            site.position = {col * a + (row % 2) * 0.5 * a, row * h};
            site.sectors = make_sectors(sector_template, sectors_per_site, boresight_offset_deg);
            out.deployment.sites.push_back(site);
        }
    }
    // Sites 5, 6 (middle row) and 10 (top row) enclose the central triangle;
    // with the default 30/150/270 boresights each has a sector facing it.
    out.triangle = {out.deployment.sites[5].position, out.deployment.sites[6].position,
                    out.deployment.sites[10].position};
    return out;
}

}  // namespace sinrlab
