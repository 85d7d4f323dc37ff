#pragma once

#include <vector>

#include "sinrlab/grid.hpp"

namespace sinrlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Log-distance path loss: intercept + slope * log10(d / reference), with an
// optional minimum-distance clamp against the d -> 0 singularity.
struct PropagationModel {
    double pathloss_intercept_db = 128.1;
    double pathloss_exponent_coeff = 37.6;  // dB per decade
    double reference_distance_km = 1.0;
    double carrier_freq_hz = 2.0e9;
    double bandwidth_hz = 20.0e6;
    double min_distance_m = 35.0;  // 0 disables the clamp
};

struct AntennaPattern {
    enum class Kind { Omni, Sector3d };
    Kind kind = Kind::Omni;
    double boresight_azimuth_deg = 0.0;
    double horizontal_3db_beamwidth_deg = 70.0;
    double vertical_3db_beamwidth_deg = 10.0;
    double max_attenuation_db = 25.0;      // A_m
    double sidelobe_attenuation_db = 20.0;  // SLA_v
    double downtilt_deg = 15.0;
    double max_gain_dbi = 14.0;
    double bs_height_m = 32.0;
    double ue_height_m = 1.5;
};

struct Sector {
    double transmit_power_dbm = 49.0;
    AntennaPattern antenna;
};

struct Site {
    Vec2 position;
    std::vector<Sector> sectors;
};

struct Deployment {
    std::vector<Site> sites;
    PropagationModel propagation;
    double ue_antenna_gain_dbi = 0.0;
};

double path_loss_db(const PropagationModel& model, double distance_m);

// Gain toward a UE. Omni returns the peak gain; Sector3d applies the
// combined horizontal/vertical parabolic pattern capped at A_m.
double antenna_gain_db(const AntennaPattern& pattern, const Vec2& sector_pos,
                       const Vec2& ue_pos);

double mean_rx_power_dbm(const Deployment& dep, const Vec2& ue_pos, int site_index,
                         int sector_index);

// Index of the sector with the highest mean receive power (ties: lowest index).
int strongest_sector(const Deployment& dep, const Vec2& ue_pos, int site_index);

// 10 log10(1 + sum of weaker-sector pattern gains over the strongest one):
// the dB increment turning the strongest-sector power into the site's total
// interfering power. 0 for single-sector sites.
double site_gsec_db(const Deployment& dep, const Vec2& ue_pos, int site_index);

// Linear gain ratio sum of the weaker sectors alone (0 for single-sector).
double site_weaker_sector_ratio(const Deployment& dep, const Vec2& ue_pos, int site_index);

// Hexagonal lattice of sites: ring 0 is the origin, ring r adds 6r sites at
// hex distance r * isd. sectors_per_site replicas of the template are placed
// with boresights boresight_offset + k*360/sectors.
Deployment build_hex_grid(int num_rings, double inter_site_distance_m,
                          const Sector& sector_template, int sectors_per_site,
                          double boresight_offset_deg = 30.0);

// Fixed 12-site lattice cluster (three rows of four) used by the bundled
// evaluation scenario; returns the deployment and the inner triangle of
// sites facing each other across the middle of the cluster.
struct Paper12Layout {
    Deployment deployment;
    std::vector<Vec2> triangle;  // 3 vertices (site positions)
};
Paper12Layout build_paper12(double inter_site_distance_m, const Sector& sector_template,
                            int sectors_per_site = 3, double boresight_offset_deg = 30.0);

}  // namespace sinrlab
