#include "sinrlab/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace sinrlab {

namespace {
constexpr double kTruncUnderflow = 1e-300;

void write_double(std::ostream& os, double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 11);
    os.write(buf, res.ptr - buf);
}
}  // namespace

double trapezoid_mass(const Eigen::ArrayXd& density, int lo, int hi, double step) {
    if (hi < lo) return 0.0;
    if (hi == lo) return 0.0;
    double s = density.segment(lo, hi - lo + 1).sum();
    s -= 0.5 * (density[lo] + density[hi]);
    return s * step;
}

void GriddedDist::recompute_mass() {
    if (kind == Kind::Gridded)
        mass = trapezoid_mass(density, lo, hi, grid.step_db);
}

void GriddedDist::shrink_support(double rel_floor) {
    if (kind != Kind::Gridded) return;
    const double peak = (hi >= lo) ? density.segment(lo, hi - lo + 1).maxCoeff() : 0.0;
    const double floor = peak * rel_floor;
    int a = lo, b = hi;
    while (a <= b && density[a] <= floor) ++a;
    while (b >= a && density[b] <= floor) --b;
    if (a > b) {
        kind = Kind::Zero;
        density.resize(0);
        lo = 0;
        hi = -1;
        mass = 0.0;
        return;
    }
    if (a > lo) density.segment(lo, a - lo).setZero();
    if (b < hi) density.segment(b + 1, hi - b).setZero();
    lo = a;
    hi = b;
    recompute_mass();
}

double GriddedDist::density_at(double x_db) const {
    if (kind != Kind::Gridded) return 0.0;
    const double p = grid.position(x_db);
    if (p < lo || p > hi) return 0.0;
    const int k = std::min(static_cast<int>(p), hi - 1);
    if (k < lo) return density[lo];
    const double w = p - k;
    return density[k] * (1.0 - w) + density[k + 1] * w;
}

Eigen::ArrayXd cumulative_trapezoid(const GriddedDist& d) {
    Eigen::ArrayXd c = Eigen::ArrayXd::Zero(d.grid.n);
    if (d.kind != GriddedDist::Kind::Gridded || d.hi <= d.lo) {
        if (d.kind == GriddedDist::Kind::Gridded && d.hi == d.lo)
            c.segment(d.lo, d.grid.n - d.lo).setConstant(0.0);
        return c;
    }
    const double h = 0.5 * d.grid.step_db;
    double acc = 0.0;
    for (int i = d.lo + 1; i <= d.hi; ++i) {
        acc += h * (d.density[i - 1] + d.density[i]);
        c[i] = acc;
    }
    if (d.hi + 1 < d.grid.n) c.segment(d.hi + 1, d.grid.n - d.hi - 1).setConstant(acc);
    return c;
}

GriddedDist gaussian_on_grid(const DbGrid& grid, double mean_db, double std_db) {
    if (std_db < 0.0) throw std::invalid_argument("gaussian_on_grid: negative std");
    if (std_db == 0.0) return GriddedDist::point_mass(mean_db);
    if (mean_db < grid.min_db - 10.0 * std_db || mean_db > grid.max_db() + 10.0 * std_db)
        throw std::invalid_argument("gaussian_on_grid: mean too far outside grid");

    GriddedDist d = GriddedDist::gridded(grid);
    const double inv = 1.0 / std_db;
    const double norm = 1.0 / (std_db * std::sqrt(2.0 * M_PI));
    for (int i = 0; i < grid.n; ++i) {
        const double t = (grid.value(i) - mean_db) * inv;
        const double e = -0.5 * t * t;
        d.density[i] = (e > -700.0) ? norm * std::exp(e) : 0.0;
    }
    d.shrink_support(0.0);
    if (d.is_zero() || !(d.mass > 0.0))
        throw std::invalid_argument("gaussian_on_grid: no representable mass on grid");
    d.density /= d.mass;
    d.recompute_mass();
    return d;
}

double cdf(const GriddedDist& d, double x_db) {
    switch (d.kind) {
        case GriddedDist::Kind::Zero:
            return 0.0;
        case GriddedDist::Kind::ZeroPower:
            return d.mass;
        case GriddedDist::Kind::PointMass:
            return x_db >= d.point_db ? d.mass : 0.0;
        case GriddedDist::Kind::Gridded:
            break;
    }
    const double p = d.grid.position(x_db);
    if (p <= d.lo) return 0.0;
    if (p >= d.hi) return d.mass;
    Eigen::ArrayXd c = cumulative_trapezoid(d);
    const int k = static_cast<int>(p);
    const double w = p - k;
    return c[k] * (1.0 - w) + c[k + 1] * w;
}

double outage(const GriddedDist& d, double x_db) { return cdf(d, x_db); }

double quantile(const GriddedDist& d, double p) {
    if (!(p > 0.0) || !(p < d.mass))
        throw std::invalid_argument("quantile: p outside (0, total mass)");
    if (d.is_point()) return d.point_db;
    if (!d.is_gridded()) throw std::invalid_argument("quantile: degenerate distribution");
    Eigen::ArrayXd c = cumulative_trapezoid(d);
    const double* begin = c.data() + d.lo;
    const double* end = c.data() + d.hi + 1;
    const double* it = std::lower_bound(begin, end, p);
    int k = static_cast<int>(it - c.data());
    if (k <= d.lo) return d.grid.value(d.lo);
    const double c0 = c[k - 1], c1 = c[k];
    const double w = (c1 > c0) ? (p - c0) / (c1 - c0) : 0.0;
    return d.grid.value(k - 1) + w * d.grid.step_db;
}

GriddedDist truncate_above(const GriddedDist& d, double p_s_dbm) {
    switch (d.kind) {
        case GriddedDist::Kind::Zero:
            return d;
        case GriddedDist::Kind::ZeroPower:
            return d;
        case GriddedDist::Kind::PointMass:
            return d.point_db <= p_s_dbm ? d : GriddedDist::zero();
        case GriddedDist::Kind::Gridded:
            break;
    }
    const double p = d.grid.position(p_s_dbm);
    if (p >= d.hi) return d;
    if (p < d.lo) return GriddedDist::zero();
    // Cut at the last node <= p_s; the trapezoid mass of the clipped array
    // then equals the node-CDF at the cut.
    const int k = static_cast<int>(std::floor(p + 1e-9));
    GriddedDist out = d;
    if (k + 1 <= out.hi) out.density.segment(k + 1, out.hi - k).setZero();
    out.hi = k;
    if (out.hi <= out.lo) return GriddedDist::zero();
    out.recompute_mass();
    if (out.mass <= kTruncUnderflow) return GriddedDist::zero();
    return out;
}

GriddedDist truncate_above_normalized(const GriddedDist& d, double p_s_dbm) {
    GriddedDist out = truncate_above(d, p_s_dbm);
    if (out.is_zero() || out.is_point() || out.is_zero_power()) return out;
    out.density /= out.mass;
    out.mass = 1.0;
    return out;
}

void dump_density_csv(const GriddedDist& d, std::ostream& os) {
    os << "x_db,density\n";
    if (d.is_point()) {
        write_double(os, d.point_db);
        os << ",inf\n";
        return;
    }
    if (!d.is_gridded()) return;
    for (int i = d.lo; i <= d.hi; ++i) {
        write_double(os, d.grid.value(i));
        os << ',';
        write_double(os, d.density[i]);
        os << '\n';
    }
}

void dump_cdf_csv(const GriddedDist& d, std::ostream& os) {
    os << "x_db,cdf\n";
    if (!d.is_gridded()) return;
    Eigen::ArrayXd c = cumulative_trapezoid(d);
    for (int i = d.lo; i <= d.hi; ++i) {
        write_double(os, d.grid.value(i));
        os << ',';
        write_double(os, c[i]);
        os << '\n';
    }
}

}  // namespace sinrlab
