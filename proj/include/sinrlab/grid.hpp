#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sinrlab {

// Uniform axis of dB (or dBm) values. Nodes sit on the global lattice
// {i * step_db : i integer}, so grids built for different locations share
// node positions and differences of node values are exact lattice multiples.
struct DbGrid {
    double min_db = 0.0;
    double step_db = 0.1;
    int n = 0;

    double value(int i) const { return min_db + step_db * i; }
    double max_db() const { return value(n - 1); }
    double span_db() const { return step_db * (n - 1); }

    // Fractional node position of x (may be outside [0, n-1]).
    double position(double x) const { return (x - min_db) / step_db; }

    // Nearest node index, clamped to the grid.
    int clamp_index(double x) const {
        int i = static_cast<int>(std::lround(position(x)));
        if (i < 0) return 0;
        if (i >= n) return n - 1;
        return i;
    }

    bool compatible(const DbGrid& other) const {
        return std::abs(step_db - other.step_db) < 1e-12 &&
               std::abs(std::remainder(min_db - other.min_db, step_db)) < 1e-9;
    }
};

// Grid covering [p_max - span_below, p_max + span_above]. The lower edge is
// snapped down to the step lattice and the upper edge up, so the requested
// window is always contained.
inline DbGrid make_grid(double p_max_dbm, double span_below_db = 80.0,
                        double span_above_db = 40.0, double step_db = 0.1) {
    if (!(span_below_db > 0.0) || !(span_above_db > 0.0))
        throw std::invalid_argument("make_grid: spans must be positive");
    if (!(step_db > 0.0))
        throw std::invalid_argument("make_grid: step must be positive");
    const double lo = p_max_dbm - span_below_db;
    const double hi = p_max_dbm + span_above_db;
    const std::int64_t ilo = static_cast<std::int64_t>(std::floor(lo / step_db + 1e-9));
    const std::int64_t ihi = static_cast<std::int64_t>(std::ceil(hi / step_db - 1e-9));
    DbGrid g;
    g.step_db = step_db;
    g.min_db = static_cast<double>(ilo) * step_db;
    g.n = static_cast<int>(ihi - ilo) + 1;
    return g;
}

}  // namespace sinrlab
