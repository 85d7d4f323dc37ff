#include "sinrlab/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sinrlab {

namespace {

constexpr double kMassCheckFloor = 1e-290;
constexpr double kMassTol = 1e-3;

double pow10_db(double x) { return std::pow(10.0, 0.1 * x); }
double db_of(double linear) { return 10.0 * std::log10(linear); }

// Linear-power sum of two dB values.
double db_sum(double a_db, double b_db) {
    const double hi = std::max(a_db, b_db), lo = std::min(a_db, b_db);
    return hi + db_of(1.0 + pow10_db(lo - hi));
}

Eigen::ArrayXd padded(const GriddedDist& d) {
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(d.grid.n + 1);
    v.head(d.grid.n) = d.density;
    return v;
}

Eigen::ArrayXd weighted(const GriddedDist& d) {
    Eigen::ArrayXd a = Eigen::ArrayXd::Zero(d.grid.n + 1);
    if (d.hi > d.lo) {
        a.segment(d.lo, d.hi - d.lo + 1) =
            d.density.segment(d.lo, d.hi - d.lo + 1) * d.grid.step_db;
        a[d.lo] *= 0.5;
        a[d.hi] *= 0.5;
    }
    return a;
}

GriddedDist finalize(GriddedDist&& out, double expected_mass, const char* what) {
    out.shrink_support(0.0);
    if (out.is_zero()) {
        if (expected_mass > kMassCheckFloor)
            throw numerical_error(std::string(what) + ": result vanished on grid");
        return std::move(out);
    }
    if (expected_mass > kMassCheckFloor) {
        const double rel = std::abs(out.mass - expected_mass) / expected_mass;
        if (rel > kMassTol)
            throw numerical_error(std::string(what) + ": mass deviates from operand product by " +
                                  std::to_string(rel));
    }
    return std::move(out);
}

}  // namespace

double logconv_phi(double u_db) { return db_of(pow10_db(u_db) - 1.0); }

LogConvTables make_logconv_tables(double step_db, int n_lags, double shift_db) {
    LogConvTables t;
    t.shift_db = shift_db;
    t.pos = Eigen::ArrayXd::Constant(n_lags + 1, std::numeric_limits<double>::quiet_NaN());
    for (int d = 1; d <= n_lags; ++d) {
        const double u = d * step_db - shift_db;
        if (u <= 0.0) continue;
        t.pos[d] = (shift_db + logconv_phi(u)) / step_db;
    }
    return t;
}

void logconv_accumulate(Eigen::ArrayXd& out, int o_lo, int o_hi,
                        const Eigen::ArrayXd& a_weighted, int a_lo, int a_hi,
                        const Eigen::ArrayXd& b, int b_lo, int b_hi,
                        const LogConvTables& tables) {
    const int max_lag = std::min<int>(tables.pos.size() - 1, o_hi - a_lo);
    for (int d = 1; d <= max_lag; ++d) {
        const double p = tables.pos[d];
        if (std::isnan(p)) continue;
        const double kf = std::floor(p);
        const int k = static_cast<int>(kf);
        const double w = p - kf;
        // z constraints: a support, output window, b support reached via z + p.
        int z0 = std::max(a_lo, o_lo - d);
        int z1 = std::min(a_hi, o_hi - d);
        z0 = std::max(z0, static_cast<int>(std::ceil(b_lo - p - 1e-12)));
        z1 = std::min(z1, static_cast<int>(std::floor(b_hi - p + 1e-12)));
        if (z1 < z0) continue;
        const int len = z1 - z0 + 1;
        out.segment(z0 + d, len) +=
            a_weighted.segment(z0, len) *
            ((1.0 - w) * b.segment(z0 + k, len) + w * b.segment(z0 + k + 1, len));
    }
}

GriddedDist pointmass_combine(const GriddedDist& x, double q_db, double weight,
                              double x_shift_db) {
    GriddedDist out = GriddedDist::gridded(x.grid);
    const DbGrid& g = x.grid;
    const double lo_val = db_sum(g.value(x.lo) + x_shift_db, q_db);
    const double hi_val = db_sum(g.value(x.hi) + x_shift_db, q_db);
    const int o_lo = std::max(0, static_cast<int>(std::floor(g.position(lo_val))));
    const int o_hi = std::min(g.n - 1, static_cast<int>(std::ceil(g.position(hi_val))));
    for (int r = o_lo; r <= o_hi; ++r) {
        const double rv = g.value(r);
        const double diff = pow10_db(rv) - pow10_db(q_db);
        if (diff <= 0.0) continue;
        const double jac = pow10_db(rv) / diff;
        out.density[r] = weight * x.density_at(db_of(diff) - x_shift_db) * jac;
    }
    out.lo = o_lo;
    out.hi = o_hi;
    out.recompute_mass();
    return out;
}

GriddedDist shift_resample(const GriddedDist& x, double shift_db) {
    if (shift_db == 0.0) return x;
    if (x.is_point()) return GriddedDist::point_mass(x.point_db + shift_db, x.mass);
    if (!x.is_gridded()) return x;
    GriddedDist out = GriddedDist::gridded(x.grid);
    for (int i = 0; i < x.grid.n; ++i)
        out.density[i] = x.density_at(x.grid.value(i) - shift_db);
    out.shrink_support(0.0);
    return out;
}

GriddedDist log_convolve_shifted(const GriddedDist& x, const GriddedDist& y,
                                 double y_shift_db) {
    using K = GriddedDist::Kind;
    if (x.kind == K::Zero || y.kind == K::Zero) return GriddedDist::zero();
    if (x.kind == K::ZeroPower) {
        GriddedDist out = shift_resample(y, y_shift_db);
        out.mass *= x.mass;
        if (out.is_gridded()) out.density *= x.mass;
        return out;
    }
    if (y.kind == K::ZeroPower) {
        GriddedDist out = x;
        out.mass *= y.mass;
        if (out.is_gridded()) out.density *= y.mass;
        return out;
    }
    if (x.kind == K::PointMass && y.kind == K::PointMass)
        return GriddedDist::point_mass(db_sum(x.point_db, y.point_db + y_shift_db),
                                       x.mass * y.mass);
    if (x.kind == K::PointMass)
        return finalize(pointmass_combine(y, x.point_db, x.mass, y_shift_db),
                        x.mass * y.mass, "log_convolve");
    if (y.kind == K::PointMass)
        return finalize(pointmass_combine(x, y.point_db + y_shift_db, y.mass),
                        x.mass * y.mass, "log_convolve");

    if (!x.grid.compatible(y.grid) || x.grid.n != y.grid.n ||
        std::abs(x.grid.min_db - y.grid.min_db) > 1e-9)
        throw std::invalid_argument("log_convolve: operands on different grids");

    const DbGrid& g = x.grid;
    GriddedDist out = GriddedDist::gridded(g);
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(g.n + 1);

    const double lo_val = db_sum(g.value(x.lo), g.value(y.lo) + y_shift_db);
    const double hi_val = db_sum(g.value(x.hi), g.value(y.hi) + y_shift_db);
    const int o_lo = std::max(0, static_cast<int>(std::floor(g.position(lo_val))) - 1);
    const int o_hi = std::min(g.n - 1, static_cast<int>(std::ceil(g.position(hi_val))) + 1);

    const int n_lags = o_hi - std::min(x.lo, y.lo);
    // Term with X on-node and Y interpolated at D(r,z) - shift, plus the
    // mirrored term with the roles exchanged.
    LogConvTables ty = make_logconv_tables(g.step_db, std::max(1, n_lags), y_shift_db);
    logconv_accumulate(acc, o_lo, o_hi, weighted(x), x.lo, x.hi, padded(y), y.lo, y.hi, ty);
    LogConvTables tx = make_logconv_tables(g.step_db, std::max(1, n_lags), -y_shift_db);
    // Change of variables: integrate over Y's own node values, querying X.
    logconv_accumulate(acc, o_lo, o_hi, weighted(y), y.lo, y.hi, padded(x), x.lo, x.hi, tx);

    out.density = acc.head(g.n);
    out.lo = o_lo;
    out.hi = o_hi;
    out.recompute_mass();
    return finalize(std::move(out), x.mass * y.mass, "log_convolve");
}

GriddedDist log_convolve(const GriddedDist& x, const GriddedDist& y) {
    return log_convolve_shifted(x, y, 0.0);
}

GriddedDist cross_difference(const GriddedDist& x, const GriddedDist& y) {
    using K = GriddedDist::Kind;
    if (x.kind == K::Zero || y.kind == K::Zero) return GriddedDist::zero();
    if (x.kind == K::ZeroPower || y.kind == K::ZeroPower)
        throw std::invalid_argument("cross_difference: zero-power operand");
    if (x.kind == K::PointMass && y.kind == K::PointMass)
        return GriddedDist::point_mass(x.point_db - y.point_db, x.mass * y.mass);
    if (y.kind == K::PointMass) {
        GriddedDist out = shift_resample(x, -y.point_db);
        out.mass *= y.mass;
        if (out.is_gridded()) out.density *= y.mass;
        return out;
    }
    if (x.kind == K::PointMass) {
        // a - Y: reverse Y around the point.
        DbGrid og;
        og.step_db = y.grid.step_db;
        og.min_db = x.point_db - y.grid.value(y.hi);
        og.n = y.hi - y.lo + 1;
        GriddedDist out = GriddedDist::gridded(og);
        for (int m = 0; m < og.n; ++m)
            out.density[m] = x.mass * y.density_at(x.point_db - og.value(m));
        out.shrink_support(0.0);
        return out;
    }

    if (!x.grid.compatible(y.grid))
        throw std::invalid_argument("cross_difference: incompatible grids");
    const double step = x.grid.step_db;
    DbGrid og;
    og.step_db = step;
    og.min_db = x.grid.value(x.lo) - y.grid.value(y.hi);
    og.n = (x.hi - x.lo) + (y.hi - y.lo) + 1;
    GriddedDist out = GriddedDist::gridded(og);

    // Out node m has value vx(x.lo) - vy(y.hi) + m*step, pairing x node n
    // with y node n - shift_m.
    for (int m = 0; m < og.n; ++m) {
        const int shift_m = m + x.lo - y.hi;
        const int n0 = std::max(x.lo, y.lo + shift_m);
        const int n1 = std::min(x.hi, y.hi + shift_m);
        if (n1 <= n0) continue;
        const int len = n1 - n0 + 1;
        Eigen::ArrayXd prod = x.density.segment(n0, len) * y.density.segment(n0 - shift_m, len);
        out.density[m] = step * (prod.sum() - 0.5 * (prod[0] + prod[len - 1]));
    }
    out.shrink_support(0.0);
    return out;
}

}  // namespace sinrlab
