#pragma once

// Internal solver state shared by the model translation units. Densities of
// all links live on one extended "workspace" grid with one node of zero
// padding; truncation never copies arrays, it only narrows index windows.

#include <Eigen/Dense>

#include <vector>

#include "sinrlab/convolve.hpp"
#include "sinrlab/dist.hpp"
#include "sinrlab/model.hpp"

namespace sinrlab::detail {

// Density floor (relative to each array's peak) below which supports are
// clipped; keeps absolute CDF fidelity comfortably below 1e-12.
constexpr double kSupportFloor = 1e-16;
// Serving candidates whose association probability bound falls below this
// are dropped from the mixture.
constexpr double kCandidateFloor = 1e-14;
// Fixed number of sweep blocks; the block partition (not the worker count)
// defines the reduction order, so results are worker-count independent.
constexpr int kSweepBlocks = 8;

double pow10_db(double x);
double db_of(double linear);
double db_sum(double a_db, double b_db);
double normal_cdf(double z);

// Interpolation tables for the two integrand roles of a shifted factor.
LogConvTables make_tables_query_shifted(double step_db, int n_lags, double shift_db);
LogConvTables make_tables_node_shifted(double step_db, int n_lags, double shift_db);

struct Workspace {
    const LinkEnsemble* ens = nullptr;
    DbGrid g;  // extended grid
    int n = 0;
    int num_sites = 0;
    double step = 0.0;

    // Per-site strongest-sector power density on the workspace grid.
    std::vector<Eigen::ArrayXd> f;    // size n+1, zero padded
    std::vector<Eigen::ArrayXd> fw;   // trapezoid-weighted density (halves at support ends)
    std::vector<Eigen::ArrayXd> F;    // cumulative trapezoid, size n
    std::vector<int> lo, hi;
    std::vector<double> gsec;          // interferer-side shift per site
    std::vector<double> serve_shift;   // 10log10(weaker ratio) per site, -inf if none
    std::vector<LogConvTables> tq;     // query-shifted tables per site
    std::vector<LogConvTables> tn;     // node-shifted tables per site
    LogConvTables plain;

    // Noise on the workspace grid.
    GriddedDist noise;

    std::vector<int> order;  // sites sorted by descending mean (ties by index)

    // Association candidates and their active quadrature windows.
    std::vector<char> candidate;
    std::vector<int> act_lo, act_hi;
    Eigen::ArrayXd assoc_weight;  // w_i per site

    explicit Workspace(const LinkEnsemble& e);
};

// h_i accumulators on the SINR index lattice m = k - u (value m * step).
struct SinrAccum {
    Eigen::ArrayXd h;  // size 2n-1, index m + (n-1)
    explicit SinrAccum(int n) : h(Eigen::ArrayXd::Zero(2 * n - 1)) {}
};

// Runs the truncated-interferer sweep for the masked candidates and returns
// one sub-probability accumulator per site (empty for unmasked sites).
std::vector<SinrAccum> run_best_server_sweep(const Workspace& ws,
                                             const std::vector<char>& candidate_mask,
                                             int n_workers);

GriddedDist accum_to_dist(const Workspace& ws, const Eigen::ArrayXd& h);

}  // namespace sinrlab::detail
