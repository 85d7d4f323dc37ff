#pragma once

#include <Eigen/Dense>

#include "sinrlab/dist.hpp"

namespace sinrlab {

// Per-lag interpolation tables for the logarithmic convolution on a uniform
// dB lattice. With nodes step_db apart, the inner integrand of
//   f_R(r) = int f_A(z) f_B(D(r,z) - shift) dz,  D(r,z) = 10 log10(10^{r/10} - 10^{z/10})
// is evaluated at a fractional node offset that depends only on the lag
// d = index(r) - index(z):
//   pos[d] = (phi(d * step) - shift) / step,  phi(u) = 10 log10(10^{u/10} - 1).
// Entries are NaN where D is undefined (lag too small for the shift).
struct LogConvTables {
    Eigen::ArrayXd pos;  // size n_lags + 1; pos[0] unused
    double shift_db = 0.0;
};

LogConvTables make_logconv_tables(double step_db, int n_lags, double shift_db);

// phi(u) = 10 log10(10^{u/10} - 1), u > 0.
double logconv_phi(double u_db);

// out[z + d] += a[z] * lerp(b, z + pos[d]) for every lag d and node z, with
// support windows [aLo,aHi], [bLo,bHi] and output window [oLo,oHi]. Arrays
// must carry one node of zero padding past index n-1. `a` must already
// include the trapezoid quadrature weights.
void logconv_accumulate(Eigen::ArrayXd& out, int o_lo, int o_hi,
                        const Eigen::ArrayXd& a_weighted, int a_lo, int a_hi,
                        const Eigen::ArrayXd& b, int b_lo, int b_hi,
                        const LogConvTables& tables);

// PDF of 10 log10(10^{X/10} + 10^{Y/10}): distribution of the sum of the two
// linear-domain powers, on the common grid of the operands. Errors when the
// result's trapezoidal mass deviates from the product of the operand masses
// by more than 0.1% (insufficient grid headroom or resolution).
GriddedDist log_convolve(const GriddedDist& x, const GriddedDist& y);

// Same with the second operand shifted by a constant: 10^{X/10} + 10^{(Y+s)/10}.
GriddedDist log_convolve_shifted(const GriddedDist& x, const GriddedDist& y,
                                 double y_shift_db);

// PDF of X - Y (dB difference of independent dB-domain RVs), on a fresh grid
// spanning the reachable differences.
GriddedDist cross_difference(const GriddedDist& x, const GriddedDist& y);

// Density of 10 log10(10^{(X+s)/10} + 10^{q/10}) for gridded X and a point
// mass of the given weight at q: analytic change of variables, no quadrature.
GriddedDist pointmass_combine(const GriddedDist& x, double q_db, double weight,
                              double x_shift_db = 0.0);

// X resampled onto its own grid after adding shift_db (linear interpolation).
GriddedDist shift_resample(const GriddedDist& x, double shift_db);

}  // namespace sinrlab
