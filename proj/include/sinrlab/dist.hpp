#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>

#include "sinrlab/grid.hpp"

namespace sinrlab {

class numerical_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Distribution of a logarithmic (dB-domain) quantity.
//
// Gridded holds a density (1/dB) sampled on a DbGrid; all integrals are
// trapezoidal over the tracked support [lo, hi], with half weights at the
// support ends. PointMass is a degenerate value in dB. Zero is the
// impossible branch (total mass 0). ZeroPower is deterministic zero linear
// power (dB value -inf): the identity element of log-convolution.
struct GriddedDist {
    enum class Kind { Gridded, PointMass, Zero, ZeroPower };

    Kind kind = Kind::Zero;
    DbGrid grid;             // Gridded only
    Eigen::ArrayXd density;  // Gridded only, size grid.n, zero outside [lo, hi]
    int lo = 0, hi = -1;     // inclusive support bounds (node indices)
    double point_db = 0.0;   // PointMass only
    double mass = 0.0;       // cached total mass (PointMass carries weight here)

    static GriddedDist zero() { return GriddedDist{}; }

    static GriddedDist zero_power() {
        GriddedDist d;
        d.kind = Kind::ZeroPower;
        d.mass = 1.0;
        return d;
    }

    static GriddedDist point_mass(double x_db, double weight = 1.0) {
        GriddedDist d;
        d.kind = Kind::PointMass;
        d.point_db = x_db;
        d.mass = weight;
        return d;
    }

    static GriddedDist gridded(const DbGrid& g) {
        GriddedDist d;
        d.kind = Kind::Gridded;
        d.grid = g;
        d.density = Eigen::ArrayXd::Zero(g.n);
        d.lo = 0;
        d.hi = g.n - 1;
        return d;
    }

    bool is_gridded() const { return kind == Kind::Gridded; }
    bool is_point() const { return kind == Kind::PointMass; }
    bool is_zero() const { return kind == Kind::Zero; }
    bool is_zero_power() const { return kind == Kind::ZeroPower; }

    // Tightens [lo, hi] to the smallest window holding all density above
    // rel_floor * max, then recomputes the cached mass.
    void shrink_support(double rel_floor = 0.0);
    void recompute_mass();

    // Density at an arbitrary dB value, linearly interpolated inside the
    // support, 0 outside.
    double density_at(double x_db) const;
};

// Trapezoidal mass of a density segment [lo, hi] (half weights at the ends).
double trapezoid_mass(const Eigen::ArrayXd& density, int lo, int hi, double step);

// Node-wise cumulative trapezoid over the support; values before lo are 0,
// after hi equal the total mass. Returned array has grid.n entries.
Eigen::ArrayXd cumulative_trapezoid(const GriddedDist& d);

// Normal density sampled on the grid and renormalized to unit trapezoidal
// mass; std 0 degenerates to a PointMass. Errors if the mean lies more than
// 10 std outside the grid.
GriddedDist gaussian_on_grid(const DbGrid& grid, double mean_db, double std_db);

double cdf(const GriddedDist& d, double x_db);
double outage(const GriddedDist& d, double x_db);

// Generalized inverse of cdf; linear interpolation between node CDF values.
// Requires 0 < p < total mass.
double quantile(const GriddedDist& d, double p);

// Clips the distribution to x <= p_s_dbm. The plain variant keeps the raw
// density (mass = cdf(p_s)); the normalized variant rescales to unit mass
// and returns Zero when cdf(p_s) underflows.
GriddedDist truncate_above(const GriddedDist& d, double p_s_dbm);
GriddedDist truncate_above_normalized(const GriddedDist& d, double p_s_dbm);

// Two-column CSV dumps (x_db,density) and (x_db,cdf) for debugging.
void dump_density_csv(const GriddedDist& d, std::ostream& os);
void dump_cdf_csv(const GriddedDist& d, std::ostream& os);

}  // namespace sinrlab
