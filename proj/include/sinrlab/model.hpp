#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "sinrlab/deployment.hpp"
#include "sinrlab/dist.hpp"

namespace sinrlab {

// Zero-mean log-normal shadowing with cross-correlation rho between sites;
// sectors of one site are fully correlated (they share the site process).
struct ShadowingModel {
    double sigma_db = 8.0;
    double rho_intersite = 0.5;

    double sigma_eff_db() const { return std::sqrt(1.0 - rho_intersite) * sigma_db; }
    double noise_std_db() const { return std::sqrt(rho_intersite) * sigma_db; }
};

struct NoiseModel {
    bool enabled = true;
    double thermal_density_dbm_per_hz = -174.0;
    double noise_figure_db = 9.0;

    double power_dbm(double bandwidth_hz) const {
        return thermal_density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    }
    static NoiseModel disabled() {
        NoiseModel n;
        n.enabled = false;
        return n;
    }
};

struct GridSpec {
    double step_db = 0.1;
    // <= 0 selects automatically: at least the default window, widened when
    // the effective std calls for more coverage.
    double span_below_db = 0.0;
    double span_above_db = 0.0;
};

// Per-location view of the network after correlation removal: every link
// carries the strongest-sector mean and the common effective std; the noise
// has become a Gaussian around P_N.
struct LinkEnsemble {
    struct SiteLink {
        int strongest_sector = 0;
        double mean_dbm = 0.0;      // via strongest sector
        double gsec_db = 0.0;       // interferer-side weaker-sector increment
        double weaker_ratio = 0.0;  // serving-side weaker-sector linear ratio sum
        double distance_m = 0.0;
        double pathloss_db = 0.0;
    };
    Vec2 ue_position;
    std::vector<SiteLink> links;
    double sigma_eff_db = 0.0;
    bool noise_enabled = false;
    double noise_mean_dbm = 0.0;
    double noise_std_db = 0.0;
    DbGrid grid;           // discretization window around p_max
    double p_max_dbm = 0.0;

    int num_sites() const { return static_cast<int>(links.size()); }
};

LinkEnsemble build_link_ensemble(const Deployment& dep, const ShadowingModel& shadowing,
                                 const NoiseModel& noise, const Vec2& ue_position,
                                 const GridSpec& grid_spec = {});

enum class AssociationMode { BestServer, ShortestDistance, SmallestPathLoss, FixedSite };

struct SinrDistribution {
    GriddedDist dist;            // PDF of the SINR in dB
    Eigen::ArrayXd assoc_prob;   // per-site association probability w_i
    Vec2 location;
    AssociationMode mode = AssociationMode::BestServer;
};

// omega_i(P_S) = f_i(P_S) * prod_{j != i} F_j(P_S): density that site i
// serves with power exactly P_S. Requires sigma_eff > 0.
double association_weight_density(const LinkEnsemble& ens, int site_i, double p_s_dbm);

// Normalized PDF of interference plus noise conditioned on site i serving
// with power p_s: interferers truncated above p_s (shifted by their G_sec),
// recursively log-convolved with the noise, then combined with the serving
// site's weaker sectors. Zero when the conditioning event is impossible.
GriddedDist interference_noise_pdf(const LinkEnsemble& ens, int serving_site, double p_s_dbm);

// Sub-probability SINR distribution of the association option "site i
// serves"; total mass is the association probability w_i.
GriddedDist conditional_sinr_dist(const LinkEnsemble& ens, int site_i);

// Final best-server SINR distribution: sum of the conditional distributions
// over all sites.
SinrDistribution sinr_best_server(const LinkEnsemble& ens);

// Deterministic association: serving site fixed by distance, path loss or
// index; interferers enter untruncated.
SinrDistribution sinr_fixed_association(const LinkEnsemble& ens, AssociationMode mode,
                                        int fixed_site = 0);

struct AreaSpec {
    std::vector<Vec2> polygon;
    double spacing_m = 10.0;
};

// Points of the evaluation lattice that fall inside the polygon.
std::vector<Vec2> area_grid_points(const AreaSpec& area);

// Uniform-weight mixture of per-location SINR distributions over the area
// lattice. Runs locations in parallel; the result is independent of the
// worker count.
SinrDistribution area_sinr(const Deployment& dep, const ShadowingModel& shadowing,
                           const NoiseModel& noise, const AreaSpec& area,
                           AssociationMode mode = AssociationMode::BestServer,
                           const GridSpec& grid_spec = {});

// Worker count for parallel sections: SINRLAB_WORKERS when set, else the
// hardware concurrency.
int worker_count();

}  // namespace sinrlab
