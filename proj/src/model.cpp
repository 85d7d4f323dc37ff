#include "sinrlab/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sinrlab/convolve.hpp"
#include "workspace.hpp"

namespace sinrlab {

using detail::db_of;
using detail::db_sum;
using detail::pow10_db;
using detail::Workspace;

int worker_count() {
    if (const char* env = std::getenv("SINRLAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

LinkEnsemble build_link_ensemble(const Deployment& dep, const ShadowingModel& shadowing,
                                 const NoiseModel& noise, const Vec2& ue_position,
                                 const GridSpec& grid_spec) {
    if (dep.sites.empty()) throw std::invalid_argument("build_link_ensemble: no sites");
    if (shadowing.sigma_db < 0.0 || shadowing.rho_intersite < 0.0 ||
        shadowing.rho_intersite > 1.0)
        throw std::invalid_argument("build_link_ensemble: invalid shadowing parameters");

    LinkEnsemble ens;
    ens.ue_position = ue_position;
    ens.sigma_eff_db = shadowing.sigma_eff_db();
    ens.noise_enabled = noise.enabled;
    ens.noise_mean_dbm = noise.enabled ? noise.power_dbm(dep.propagation.bandwidth_hz) : 0.0;
    ens.noise_std_db = noise.enabled ? shadowing.noise_std_db() : 0.0;

    double p_max = -1e300;
    for (int j = 0; j < static_cast<int>(dep.sites.size()); ++j) {
        LinkEnsemble::SiteLink link;
        link.strongest_sector = strongest_sector(dep, ue_position, j);
        link.mean_dbm = mean_rx_power_dbm(dep, ue_position, j, link.strongest_sector);
        link.gsec_db = site_gsec_db(dep, ue_position, j);
        link.weaker_ratio = site_weaker_sector_ratio(dep, ue_position, j);
        link.distance_m = std::hypot(ue_position.x - dep.sites[j].position.x,
                                     ue_position.y - dep.sites[j].position.y);
        link.pathloss_db = path_loss_db(dep.propagation, link.distance_m);
        p_max = std::max(p_max, link.mean_dbm);
        ens.links.push_back(link);
    }
    ens.p_max_dbm = p_max;

    const double sigma = ens.sigma_eff_db;
    const double below = grid_spec.span_below_db > 0.0 ? grid_spec.span_below_db
                                                       : std::max(80.0, 7.0 * sigma);
    const double above = grid_spec.span_above_db > 0.0 ? grid_spec.span_above_db
                                                       : std::max(40.0, 5.0 * sigma);
    ens.grid = make_grid(p_max, below, above, grid_spec.step_db);
    return ens;
}

namespace {

double normal_pdf(double x, double mu, double sigma) {
    const double t = (x - mu) / sigma;
    return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * M_PI));
}

GriddedDist site_dist(const Workspace& ws, int j) {
    GriddedDist d = GriddedDist::gridded(ws.g);
    d.density = ws.f[j].head(ws.n);
    d.lo = ws.lo[j];
    d.hi = ws.hi[j];
    d.recompute_mass();
    return d;
}

int serving_site_for_mode(const LinkEnsemble& ens, AssociationMode mode, int fixed_site) {
    const int L = ens.num_sites();
    switch (mode) {
        case AssociationMode::FixedSite:
            if (fixed_site < 0 || fixed_site >= L)
                throw std::invalid_argument("fixed association: bad site index");
            return fixed_site;
        case AssociationMode::ShortestDistance: {
            int best = 0;
            for (int j = 1; j < L; ++j)
                if (ens.links[j].distance_m < ens.links[best].distance_m) best = j;
            return best;
        }
        case AssociationMode::SmallestPathLoss: {
            int best = 0;
            for (int j = 1; j < L; ++j)
                if (ens.links[j].pathloss_db < ens.links[best].pathloss_db) best = j;
            return best;
        }
        case AssociationMode::BestServer:
            break;
    }
    throw std::invalid_argument("fixed association: best-server is not a fixed mode");
}

// All-links-deterministic case (sigma_eff = 0): the association is fixed and
// the interference sum collapses to a single power value.
SinrDistribution deterministic_sinr(const LinkEnsemble& ens, int serving) {
    const int L = ens.num_sites();
    const LinkEnsemble::SiteLink& sv = ens.links[serving];
    double interference_lin = 0.0;
    for (int j = 0; j < L; ++j)
        if (j != serving)
            interference_lin += pow10_db(ens.links[j].mean_dbm + ens.links[j].gsec_db);
    if (sv.weaker_ratio > 0.0)
        interference_lin += pow10_db(sv.mean_dbm + db_of(sv.weaker_ratio));

    SinrDistribution out;
    out.location = ens.ue_position;
    out.assoc_prob = Eigen::ArrayXd::Zero(L);
    out.assoc_prob[serving] = 1.0;

    if (!ens.noise_enabled) {
        if (interference_lin <= 0.0)
            throw numerical_error("SINR undefined: no interference and no noise");
        out.dist = GriddedDist::point_mass(sv.mean_dbm - db_of(interference_lin));
        return out;
    }
    if (ens.noise_std_db <= 0.0) {
        const double denom = db_sum(ens.noise_mean_dbm,
                                    interference_lin > 0.0 ? db_of(interference_lin) : -1e30);
        out.dist = GriddedDist::point_mass(sv.mean_dbm - denom);
        return out;
    }
    const double sn = ens.noise_std_db;
    const double center = std::max(ens.noise_mean_dbm,
                                   interference_lin > 0.0 ? db_of(interference_lin) : -1e300);
    DbGrid g = make_grid(center, 9.0 * sn + 10.0, 9.0 * sn + 10.0, ens.grid.step_db);
    GriddedDist noise = gaussian_on_grid(g, ens.noise_mean_dbm, sn);
    GriddedDist denom = interference_lin > 0.0
                            ? pointmass_combine(noise, db_of(interference_lin), 1.0)
                            : noise;
    out.dist = cross_difference(GriddedDist::point_mass(sv.mean_dbm), denom);
    return out;
}

SinrDistribution best_server_impl(const LinkEnsemble& ens, int n_workers) {
    const int L = ens.num_sites();
    if (L < 1) throw std::invalid_argument("sinr_best_server: empty ensemble");
    if (ens.sigma_eff_db <= 0.0) {
        int best = 0;
        for (int j = 1; j < L; ++j)
            if (ens.links[j].mean_dbm > ens.links[best].mean_dbm) best = j;
        return deterministic_sinr(ens, best);
    }
    if (L == 1 && !ens.noise_enabled)
        throw numerical_error("SINR undefined: no interference and no noise");

    Workspace ws(ens);
    std::vector<char> mask(L, 1);
    auto accs = detail::run_best_server_sweep(ws, mask, n_workers);
    Eigen::ArrayXd h = Eigen::ArrayXd::Zero(2 * ws.n - 1);
    for (int i = 0; i < L; ++i) h += accs[i].h;

    SinrDistribution out;
    out.dist = detail::accum_to_dist(ws, h);
    out.assoc_prob = ws.assoc_weight;
    out.location = ens.ue_position;
    out.mode = AssociationMode::BestServer;
    if (std::abs(out.dist.mass - 1.0) > 1e-2)
        throw numerical_error("sinr_best_server: PDF mass off by " +
                              std::to_string(out.dist.mass - 1.0));
    return out;
}

}  // namespace

double association_weight_density(const LinkEnsemble& ens, int site_i, double p_s_dbm) {
    const int L = ens.num_sites();
    if (site_i < 0 || site_i >= L)
        throw std::invalid_argument("association_weight_density: bad site");
    const double sigma = ens.sigma_eff_db;
    if (sigma <= 0.0)
        throw std::invalid_argument("association_weight_density: requires sigma_eff > 0");
    double w = normal_pdf(p_s_dbm, ens.links[site_i].mean_dbm, sigma);
    for (int j = 0; j < L; ++j)
        if (j != site_i)
            w *= detail::normal_cdf((p_s_dbm - ens.links[j].mean_dbm) / sigma);
    return w;
}

GriddedDist interference_noise_pdf(const LinkEnsemble& ens, int serving_site, double p_s_dbm) {
    const int L = ens.num_sites();
    if (serving_site < 0 || serving_site >= L)
        throw std::invalid_argument("interference_noise_pdf: bad site");
    if (L == 1 && !ens.noise_enabled)
        throw numerical_error("interference_noise_pdf: no interference and no noise");

    GriddedDist chain;
    std::vector<int> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return ens.links[a].mean_dbm > ens.links[b].mean_dbm;
    });

    if (ens.sigma_eff_db > 0.0) {
        Workspace ws(ens);
        chain = ws.noise;
        for (int j : order) {
            if (j == serving_site) continue;
            GriddedDist g = truncate_above(site_dist(ws, j), p_s_dbm);
            chain = log_convolve_shifted(chain, g, ens.links[j].gsec_db);
        }
    } else {
        if (ens.noise_enabled) {
            if (ens.noise_std_db > 0.0) {
                DbGrid g = make_grid(std::max(ens.noise_mean_dbm, ens.p_max_dbm),
                                     std::max(80.0, 9.0 * ens.noise_std_db),
                                     std::max(40.0, 9.0 * ens.noise_std_db), ens.grid.step_db);
                chain = gaussian_on_grid(g, ens.noise_mean_dbm, ens.noise_std_db);
            } else {
                chain = GriddedDist::point_mass(ens.noise_mean_dbm);
            }
        } else {
            chain = GriddedDist::zero_power();
        }
        for (int j : order) {
            if (j == serving_site) continue;
            GriddedDist g = truncate_above(GriddedDist::point_mass(ens.links[j].mean_dbm),
                                           p_s_dbm);
            chain = log_convolve_shifted(chain, g, ens.links[j].gsec_db);
        }
    }
    const double wr = ens.links[serving_site].weaker_ratio;
    if (wr > 0.0 && !chain.is_zero())
        chain = log_convolve(chain, GriddedDist::point_mass(p_s_dbm + db_of(wr)));
    if (chain.is_zero()) return chain;
    if (chain.is_zero_power())
        throw numerical_error("interference_noise_pdf: empty denominator");
    if (chain.is_point()) {
        chain.mass = 1.0;
        return chain;
    }
    if (!(chain.mass > 0.0)) return GriddedDist::zero();
    chain.density /= chain.mass;
    chain.recompute_mass();
    return chain;
}

GriddedDist conditional_sinr_dist(const LinkEnsemble& ens, int site_i) {
    const int L = ens.num_sites();
    if (site_i < 0 || site_i >= L)
        throw std::invalid_argument("conditional_sinr_dist: bad site");
    if (ens.sigma_eff_db <= 0.0) {
        int best = 0;
        for (int j = 1; j < L; ++j)
            if (ens.links[j].mean_dbm > ens.links[best].mean_dbm) best = j;
        if (best != site_i) return GriddedDist::zero();
        return deterministic_sinr(ens, best).dist;
    }
    Workspace ws(ens);
    if (!ws.candidate[site_i]) return GriddedDist::zero();
    std::vector<char> mask(L, 0);
    mask[site_i] = 1;
    auto accs = detail::run_best_server_sweep(ws, mask, worker_count());
    return detail::accum_to_dist(ws, accs[site_i].h);
}

SinrDistribution sinr_best_server(const LinkEnsemble& ens) {
    return best_server_impl(ens, worker_count());
}

SinrDistribution sinr_fixed_association(const LinkEnsemble& ens, AssociationMode mode,
                                        int fixed_site) {
    const int L = ens.num_sites();
    if (L < 1) throw std::invalid_argument("sinr_fixed_association: empty ensemble");
    const int serving = serving_site_for_mode(ens, mode, fixed_site);
    if (ens.sigma_eff_db <= 0.0) {
        SinrDistribution out = deterministic_sinr(ens, serving);
        out.mode = mode;
        return out;
    }
    if (L == 1 && !ens.noise_enabled)
        throw numerical_error("SINR undefined: no interference and no noise");

    Workspace ws(ens);
    GriddedDist chain = ws.noise;
    for (int j : ws.order) {
        if (j == serving) continue;
        chain = log_convolve_shifted(chain, site_dist(ws, j), ens.links[j].gsec_db);
    }

    SinrDistribution out;
    out.location = ens.ue_position;
    out.mode = mode;
    out.assoc_prob = Eigen::ArrayXd::Zero(L);
    out.assoc_prob[serving] = 1.0;

    const double wr = ens.links[serving].weaker_ratio;
    const GriddedDist numerator = site_dist(ws, serving);
    if (wr <= 0.0) {
        if (chain.is_zero_power())
            throw numerical_error("SINR undefined: no interference and no noise");
        out.dist = cross_difference(numerator, chain);
    } else {
        // The serving site's weaker sectors add a power locked to the serving
        // power, so the subtraction runs per serving-power node.
        const double sshift = db_of(wr);
        Eigen::ArrayXd h = Eigen::ArrayXd::Zero(2 * ws.n - 1);
        const int base = ws.n - 1;
        for (int t = ws.lo[serving]; t <= ws.hi[serving]; ++t) {
            const double c = ws.step * ws.f[serving][t];
            if (!(c > 0.0)) continue;
            const double q = ws.g.value(t) + sshift;
            if (chain.is_zero_power()) {
                const double pos = -sshift / ws.step;
                const int m0 = static_cast<int>(std::floor(pos));
                const double w = pos - m0;
                h[base + m0] += c * (1.0 - w) / ws.step;
                h[base + m0 + 1] += c * w / ws.step;
                continue;
            }
            if (chain.is_point()) {
                const double pos = (ws.g.value(t) - db_sum(chain.point_db, q)) / ws.step;
                const int m0 = static_cast<int>(std::floor(pos));
                const double w = pos - m0;
                if (base + m0 >= 0 && base + m0 + 1 < h.size()) {
                    h[base + m0] += c * (1.0 - w) / ws.step;
                    h[base + m0 + 1] += c * w / ws.step;
                }
                continue;
            }
            const double ql = pow10_db(q);
            const int u_lo = std::max(
                0, static_cast<int>(std::floor(ws.g.position(db_sum(ws.g.value(chain.lo), q)))));
            const int u_hi = std::min(
                ws.n - 1,
                static_cast<int>(std::ceil(ws.g.position(db_sum(ws.g.value(chain.hi), q)))));
            for (int u = u_lo; u <= u_hi; ++u) {
                const double diff = pow10_db(ws.g.value(u)) - ql;
                if (diff <= 0.0) continue;
                const double jac = pow10_db(ws.g.value(u)) / diff;
                const double v = chain.density_at(db_of(diff));
                if (v > 0.0) h[base + t - u] += c * v * jac;
            }
        }
        out.dist = detail::accum_to_dist(ws, h);
    }
    if (std::abs(out.dist.mass - 1.0) > 1e-2)
        throw numerical_error("sinr_fixed_association: PDF mass off by " +
                              std::to_string(out.dist.mass - 1.0));
    return out;
}

namespace {

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool inside = false;
    const int n = static_cast<int>(poly.size());
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    const int n = static_cast<int>(poly.size());
    for (int i = 0, j = n - 1; i < n; j = i++)
        s += (poly[j].x + poly[i].x) * (poly[j].y - poly[i].y);
    return 0.5 * std::abs(s);
}

}  // namespace

std::vector<Vec2> area_grid_points(const AreaSpec& area) {
    if (area.polygon.size() < 3)
        throw std::invalid_argument("area: polygon needs at least 3 vertices");
    if (!(area.spacing_m > 0.0)) throw std::invalid_argument("area: non-positive spacing");
    if (!(polygon_area(area.polygon) > 0.0))
        throw std::invalid_argument("area: degenerate polygon");
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Vec2& v : area.polygon) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    std::vector<Vec2> pts;
    const double s = area.spacing_m;
    for (double y = y0 + 0.5 * s; y < y1; y += s)
        for (double x = x0 + 0.5 * s; x < x1; x += s)
            if (point_in_polygon(area.polygon, {x, y})) pts.push_back({x, y});
    if (pts.empty()) throw std::invalid_argument("area: no grid point inside polygon");
    return pts;
}

SinrDistribution area_sinr(const Deployment& dep, const ShadowingModel& shadowing,
                           const NoiseModel& noise, const AreaSpec& area,
                           AssociationMode mode, const GridSpec& grid_spec) {
    const std::vector<Vec2> pts = area_grid_points(area);
    const int P = static_cast<int>(pts.size());
    const int L = static_cast<int>(dep.sites.size());

    std::vector<SinrDistribution> results(P);
    std::vector<std::exception_ptr> errors(P);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int p = next.fetch_add(1);
            if (p >= P) return;
            try {
                LinkEnsemble ens = build_link_ensemble(dep, shadowing, noise, pts[p], grid_spec);
                results[p] = mode == AssociationMode::BestServer
                                 ? best_server_impl(ens, 1)
                                 : sinr_fixed_association(ens, mode);
            } catch (...) {
                errors[p] = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min(worker_count(), P));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (int p = 0; p < P; ++p)
        if (errors[p]) std::rethrow_exception(errors[p]);

    // Uniform mixture on the common SINR lattice.
    const double step = results[0].dist.is_gridded() ? results[0].dist.grid.step_db
                                                     : grid_spec.step_db;
    long m_lo = std::numeric_limits<long>::max(), m_hi = std::numeric_limits<long>::min();
    for (const auto& r : results) {
        if (!r.dist.is_gridded()) continue;
        const long base = std::lround(r.dist.grid.min_db / step);
        m_lo = std::min(m_lo, base + r.dist.lo);
        m_hi = std::max(m_hi, base + r.dist.hi);
    }
    if (m_lo > m_hi) throw numerical_error("area_sinr: all locations degenerate");

    DbGrid og;
    og.step_db = step;
    og.min_db = m_lo * step;
    og.n = static_cast<int>(m_hi - m_lo) + 1;
    SinrDistribution out;
    out.dist = GriddedDist::gridded(og);
    out.assoc_prob = Eigen::ArrayXd::Zero(L);
    out.mode = mode;
    const double w = 1.0 / P;
    Vec2 centroid{0.0, 0.0};
    for (const auto& r : results) {
        centroid.x += r.location.x * w;
        centroid.y += r.location.y * w;
        out.assoc_prob += w * r.assoc_prob;
        if (r.dist.is_gridded()) {
            const long base = std::lround(r.dist.grid.min_db / step) - m_lo;
            const int len = r.dist.hi - r.dist.lo + 1;
            out.dist.density.segment(base + r.dist.lo, len) +=
                w * r.dist.density.segment(r.dist.lo, len);
        } else if (r.dist.is_point()) {
            // Degenerate location: spread the point over one lattice cell.
            const double pos = (r.dist.point_db - og.min_db) / step;
            const int m0 = std::clamp(static_cast<int>(std::floor(pos)), 0, og.n - 2);
            const double frac = pos - m0;
            out.dist.density[m0] += w * r.dist.mass * (1.0 - frac) / step;
            out.dist.density[m0 + 1] += w * r.dist.mass * frac / step;
        }
    }
    out.location = centroid;
    out.dist.shrink_support(0.0);
    return out;
}

}  // namespace sinrlab
