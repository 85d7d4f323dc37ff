#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "workspace.hpp"

namespace sinrlab::detail {

double pow10_db(double x) { return std::pow(10.0, 0.1 * x); }
double db_of(double linear) { return 10.0 * std::log10(linear); }

double db_sum(double a_db, double b_db) {
    const double hi = std::max(a_db, b_db), lo = std::min(a_db, b_db);
    return hi + db_of(1.0 + pow10_db(lo - hi));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

LogConvTables make_tables_query_shifted(double step_db, int n_lags, double shift_db) {
    LogConvTables t;
    t.shift_db = shift_db;
    t.pos = Eigen::ArrayXd::Constant(n_lags + 1, std::numeric_limits<double>::quiet_NaN());
    for (int d = 1; d <= n_lags; ++d)
        t.pos[d] = (logconv_phi(d * step_db) - shift_db) / step_db;
    return t;
}

LogConvTables make_tables_node_shifted(double step_db, int n_lags, double shift_db) {
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

namespace {

Eigen::ArrayXd weighted_of(const Eigen::ArrayXd& density, int lo, int hi, double step) {
    Eigen::ArrayXd a = Eigen::ArrayXd::Zero(density.size());
    if (hi > lo) {
        a.segment(lo, hi - lo + 1) = density.segment(lo, hi - lo + 1) * step;
        a[lo] *= 0.5;
        a[hi] *= 0.5;
    }
    return a;
}

}  // namespace

Workspace::Workspace(const LinkEnsemble& e) : ens(&e) {
    const int L = e.num_sites();
    num_sites = L;
    const double sigma = e.sigma_eff_db;
    if (!(sigma > 0.0))
        throw std::logic_error("Workspace requires sigma_eff > 0");

    // Extended grid: user window plus room for the noise tails and for sums
    // of in-window powers.
    const double headroom = db_of(L + 1.0) + 3.2;
    double lo_val = e.grid.min_db;
    double hi_val = e.grid.max_db();
    for (const auto& link : e.links)
        hi_val = std::max(hi_val, link.mean_dbm + link.gsec_db + 8.6 * sigma);
    if (e.noise_enabled && e.noise_std_db > 0.0) {
        lo_val = std::min(lo_val, e.noise_mean_dbm - 8.6 * e.noise_std_db);
        hi_val = std::max(hi_val, e.noise_mean_dbm + 8.6 * e.noise_std_db);
    } else if (e.noise_enabled) {
        lo_val = std::min(lo_val, e.noise_mean_dbm - 1.0);
    }
    g = make_grid(0.5 * (lo_val + hi_val), 0.5 * (hi_val - lo_val) + headroom,
                  0.5 * (hi_val - lo_val) + headroom, e.grid.step_db);
    n = g.n;
    step = g.step_db;

    f.resize(L);
    fw.resize(L);
    F.resize(L);
    lo.resize(L);
    hi.resize(L);
    gsec.resize(L);
    serve_shift.resize(L);
    tq.resize(L);
    tn.resize(L);
    plain = make_tables_node_shifted(step, n, 0.0);

    for (int j = 0; j < L; ++j) {
        GriddedDist d = gaussian_on_grid(g, e.links[j].mean_dbm, sigma);
        d.shrink_support(kSupportFloor);
        f[j] = Eigen::ArrayXd::Zero(n + 1);
        f[j].head(n) = d.density;
        lo[j] = d.lo;
        hi[j] = d.hi;
        fw[j] = weighted_of(f[j], lo[j], hi[j], step);
        F[j] = cumulative_trapezoid(d);
        gsec[j] = e.links[j].gsec_db;
        serve_shift[j] = e.links[j].weaker_ratio > 0.0 ? db_of(e.links[j].weaker_ratio)
                                                       : -std::numeric_limits<double>::infinity();
        tq[j] = gsec[j] != 0.0 ? make_tables_query_shifted(step, n, gsec[j]) : LogConvTables{};
        tn[j] = gsec[j] != 0.0 ? make_tables_node_shifted(step, n, gsec[j]) : LogConvTables{};
    }

    if (e.noise_enabled) {
        if (e.noise_std_db > 0.0) {
            noise = gaussian_on_grid(g, e.noise_mean_dbm, e.noise_std_db);
            noise.shrink_support(kSupportFloor);
        } else {
            noise = GriddedDist::point_mass(e.noise_mean_dbm);
        }
    } else {
        noise = GriddedDist::zero_power();
    }

    order.resize(L);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return e.links[a].mean_dbm > e.links[b].mean_dbm;
    });

    // Candidate set: sites whose probability of beating the strongest other
    // site clears the floor.
    candidate.assign(L, 0);
    act_lo.assign(L, 0);
    act_hi.assign(L, -1);
    assoc_weight = Eigen::ArrayXd::Zero(L);
    double mu_max = -1e300, mu_second = -1e300;
    for (const auto& link : e.links) {
        if (link.mean_dbm > mu_max) {
            mu_second = mu_max;
            mu_max = link.mean_dbm;
        } else {
            mu_second = std::max(mu_second, link.mean_dbm);
        }
    }
    for (int i = 0; i < L; ++i) {
        const double rival = (e.links[i].mean_dbm == mu_max) ? mu_second : mu_max;
        if (L > 1 &&
            normal_cdf((e.links[i].mean_dbm - rival) / (std::sqrt(2.0) * sigma)) < kCandidateFloor)
            continue;
        candidate[i] = 1;
        // Active quadrature window from the association-weight density.
        Eigen::ArrayXd wd = Eigen::ArrayXd::Zero(n);
        for (int k = lo[i]; k <= hi[i]; ++k) {
            double p = f[i][k];
            for (int j = 0; j < L && p > 0.0; ++j)
                if (j != i) p *= F[j][k];
            wd[k] = p;
        }
        const double peak = wd.maxCoeff();
        if (!(peak > 0.0)) {
            candidate[i] = 0;
            continue;
        }
        int a = lo[i], b = hi[i];
        while (a < b && wd[a] < peak * kSupportFloor) ++a;
        while (b > a && wd[b] < peak * kSupportFloor) --b;
        act_lo[i] = std::max(lo[i], a - 2);
        act_hi[i] = std::min(hi[i], b + 2);
        assoc_weight[i] = step * wd.segment(act_lo[i], act_hi[i] - act_lo[i] + 1).sum();
    }
}

namespace {

// Chain element of the recursive convolution.
struct Chain {
    enum class Kind { Identity, Point, Grid, Zero } kind = Kind::Identity;
    double point = 0.0;
    double mass = 1.0;
    Eigen::ArrayXd v;  // size n+1
    int lo = 0, hi = -1;

    static Chain identity() { return Chain{}; }
    static Chain zero() {
        Chain c;
        c.kind = Kind::Zero;
        c.mass = 0.0;
        return c;
    }
};

class Sweep {
  public:
    Sweep(const Workspace& ws, const std::vector<char>& mask)
        : ws_(ws), mask_(mask), fw_(ws.fw) {}

    // Processes P_S nodes [k0, k1] into per-site accumulators.
    std::vector<SinrAccum> run(int k0, int k1) {
        const int L = ws_.num_sites;
        std::vector<SinrAccum> acc(L, SinrAccum(ws_.n));
        init_frozen(k0);
        for (int k = k0; k <= k1; ++k) {
            for (int j : ws_.order)
                if (ws_.hi[j] == k) freeze_site(j);
            step_k(k, acc);
        }
        return acc;
    }

  private:
    const Workspace& ws_;
    const std::vector<char>& mask_;
    std::vector<Eigen::ArrayXd> fw_;        // mutable copy for the cut-node patch
    std::vector<Chain> frozen_;             // per candidate: noise x frozen sites
    std::vector<char> frozen_done_;

    void init_frozen(int k0) {
        const int L = ws_.num_sites;
        frozen_.assign(L, Chain::identity());
        frozen_done_.assign(L, 0);
        for (int i = 0; i < L; ++i)
            if (mask_[i] && ws_.candidate[i]) frozen_[i] = noise_chain();
        // Sites already untruncated at the block start, merged in the same
        // ascending order the sequential sweep would use.
        std::vector<int> pre(ws_.order);
        std::stable_sort(pre.begin(), pre.end(),
                         [&](int a, int b) { return ws_.hi[a] < ws_.hi[b]; });
        for (int j : pre)
            if (ws_.hi[j] < k0) freeze_site(j);
    }

    Chain noise_chain() const {
        Chain c;
        const GriddedDist& nz = ws_.noise;
        if (nz.is_zero_power()) return Chain::identity();
        if (nz.is_point()) {
            c.kind = Chain::Kind::Point;
            c.point = nz.point_db;
            c.mass = nz.mass;
            return c;
        }
        c.kind = Chain::Kind::Grid;
        c.v = Eigen::ArrayXd::Zero(ws_.n + 1);
        c.v.head(ws_.n) = nz.density;
        c.lo = nz.lo;
        c.hi = nz.hi;
        c.mass = nz.mass;
        return c;
    }

    void freeze_site(int j) {
        if (frozen_done_[j]) return;
        frozen_done_[j] = 1;
        for (int i = 0; i < ws_.num_sites; ++i)
            if (i != j && mask_[i] && ws_.candidate[i])
                frozen_[i] = conv_site(frozen_[i], j, ws_.hi[j]);
    }

    // Interpolated density of site j clipped to [lo_j, bhi], queried at a
    // fractional node position.
    double eval_site(int j, double pos, int bhi) const {
        if (pos < ws_.lo[j] || pos > bhi) return 0.0;
        const int k = std::min(static_cast<int>(pos), bhi - 1);
        if (k < ws_.lo[j]) return ws_.f[j][ws_.lo[j]];
        const double w = pos - k;
        return ws_.f[j][k] * (1.0 - w) + ws_.f[j][k + 1] * w;
    }

    Chain conv_site(const Chain& acc, int j, int trunc_k) {
        if (acc.kind == Chain::Kind::Zero) return Chain::zero();
        const int bhi = std::min(ws_.hi[j], trunc_k);
        if (bhi < ws_.lo[j]) return Chain::zero();
        const double mj = ws_.F[j][bhi];
        const double shift = ws_.gsec[j];

        if (acc.kind == Chain::Kind::Identity) return materialize_site(j, bhi, acc.mass);
        if (acc.kind == Chain::Kind::Point) {
            Chain out = remap_point(j, bhi, acc.point, acc.mass);
            out.mass = acc.mass * mj;
            return out;
        }

        Chain out;
        out.kind = Chain::Kind::Grid;
        out.v = Eigen::ArrayXd::Zero(ws_.n + 1);
        const double lo_val = db_sum(ws_.g.value(acc.lo), ws_.g.value(ws_.lo[j]) + shift);
        const double hi_val = db_sum(ws_.g.value(acc.hi), ws_.g.value(bhi) + shift);
        out.lo = std::max(0, static_cast<int>(std::floor(ws_.g.position(lo_val))) - 1);
        out.hi = std::min(ws_.n - 1, static_cast<int>(std::ceil(ws_.g.position(hi_val))) + 1);

        const LogConvTables& tq = shift != 0.0 ? ws_.tq[j] : ws_.plain;
        const LogConvTables& tn = shift != 0.0 ? ws_.tn[j] : ws_.plain;
        Eigen::ArrayXd aw = weighted_of(acc.v, acc.lo, acc.hi, ws_.step);
        logconv_accumulate(out.v, out.lo, out.hi, aw, acc.lo, acc.hi, ws_.f[j], ws_.lo[j], bhi,
                           tq);
        logconv_accumulate(out.v, out.lo, out.hi, fw_[j], ws_.lo[j], bhi, acc.v, acc.lo, acc.hi,
                           tn);
        out.mass = acc.mass * mj;
        shrink(out);
        return out;
    }

    Chain conv_pair(const Chain& a, const Chain& b) {
        if (a.kind == Chain::Kind::Zero || b.kind == Chain::Kind::Zero) return Chain::zero();
        if (a.kind == Chain::Kind::Identity) {
            Chain out = b;
            out.mass *= a.mass;
            return out;
        }
        if (b.kind == Chain::Kind::Identity) {
            Chain out = a;
            out.mass *= b.mass;
            return out;
        }
        if (a.kind == Chain::Kind::Point && b.kind == Chain::Kind::Point) {
            Chain out;
            out.kind = Chain::Kind::Point;
            out.point = db_sum(a.point, b.point);
            out.mass = a.mass * b.mass;
            return out;
        }
        if (a.kind == Chain::Kind::Point) return conv_pair(b, a);
        if (b.kind == Chain::Kind::Point) {
            Chain out = remap_chain_point(a, b.point);
            out.mass = a.mass * b.mass;
            return out;
        }

        Chain out;
        out.kind = Chain::Kind::Grid;
        out.v = Eigen::ArrayXd::Zero(ws_.n + 1);
        const double lo_val = db_sum(ws_.g.value(a.lo), ws_.g.value(b.lo));
        const double hi_val = db_sum(ws_.g.value(a.hi), ws_.g.value(b.hi));
        out.lo = std::max(0, static_cast<int>(std::floor(ws_.g.position(lo_val))) - 1);
        out.hi = std::min(ws_.n - 1, static_cast<int>(std::ceil(ws_.g.position(hi_val))) + 1);
        Eigen::ArrayXd aw = weighted_of(a.v, a.lo, a.hi, ws_.step);
        logconv_accumulate(out.v, out.lo, out.hi, aw, a.lo, a.hi, b.v, b.lo, b.hi, ws_.plain);
        Eigen::ArrayXd bw = weighted_of(b.v, b.lo, b.hi, ws_.step);
        logconv_accumulate(out.v, out.lo, out.hi, bw, b.lo, b.hi, a.v, a.lo, a.hi, ws_.plain);
        out.mass = a.mass * b.mass;
        shrink(out);
        return out;
    }

    // Site j (clipped at bhi, with its G_sec shift) materialized onto the
    // grid; used only when the chain has no noise seed.
    Chain materialize_site(int j, int bhi, double mass_in) {
        Chain out;
        out.kind = Chain::Kind::Grid;
        out.v = Eigen::ArrayXd::Zero(ws_.n + 1);
        const double shift = ws_.gsec[j];
        const double off = shift / ws_.step;
        out.lo = std::max(0, static_cast<int>(std::floor(ws_.lo[j] + off)));
        out.hi = std::min(ws_.n - 1, static_cast<int>(std::ceil(bhi + off)));
        for (int r = out.lo; r <= out.hi; ++r)
            out.v[r] = eval_site(j, r - off, bhi);
        out.mass = mass_in * ws_.F[j][bhi];
        shrink(out);
        return out;
    }

    // Site j (clipped, shifted) combined with a point power q.
    Chain remap_point(int j, int bhi, double q, double weight) {
        Chain out;
        out.kind = Chain::Kind::Grid;
        out.v = Eigen::ArrayXd::Zero(ws_.n + 1);
        const double shift = ws_.gsec[j];
        const double lo_val = db_sum(ws_.g.value(ws_.lo[j]) + shift, q);
        const double hi_val = db_sum(ws_.g.value(bhi) + shift, q);
        out.lo = std::max(0, static_cast<int>(std::floor(ws_.g.position(lo_val))));
        out.hi = std::min(ws_.n - 1, static_cast<int>(std::ceil(ws_.g.position(hi_val))));
        const double ql = pow10_db(q);
        for (int r = out.lo; r <= out.hi; ++r) {
            const double diff = pow10_db(ws_.g.value(r)) - ql;
            if (diff <= 0.0) continue;
            const double jac = pow10_db(ws_.g.value(r)) / diff;
            out.v[r] = weight * eval_site(j, ws_.g.position(db_of(diff) - shift), bhi) * jac;
        }
        shrink(out);
        return out;
    }

    // Gridded chain combined with a point power q.
    Chain remap_chain_point(const Chain& a, double q) {
        Chain out;
        out.kind = Chain::Kind::Grid;
        out.v = Eigen::ArrayXd::Zero(ws_.n + 1);
        const double lo_val = db_sum(ws_.g.value(a.lo), q);
        const double hi_val = db_sum(ws_.g.value(a.hi), q);
        out.lo = std::max(0, static_cast<int>(std::floor(ws_.g.position(lo_val))));
        out.hi = std::min(ws_.n - 1, static_cast<int>(std::ceil(ws_.g.position(hi_val))));
        const double ql = pow10_db(q);
        for (int r = out.lo; r <= out.hi; ++r) {
            const double diff = pow10_db(ws_.g.value(r)) - ql;
            if (diff <= 0.0) continue;
            const double jac = pow10_db(ws_.g.value(r)) / diff;
            const double pos = ws_.g.position(db_of(diff));
            double val = 0.0;
            if (pos >= a.lo && pos <= a.hi) {
                const int kk = std::min(static_cast<int>(pos), a.hi - 1);
                const double w = pos - std::max(kk, a.lo);
                val = (kk >= a.lo) ? a.v[kk] * (1.0 - w) + a.v[kk + 1] * w : a.v[a.lo];
            }
            out.v[r] = val * jac;
        }
        shrink(out);
        return out;
    }

    void shrink(Chain& c) const {
        if (c.kind != Chain::Kind::Grid) return;
        double peak = 0.0;
        for (int i = c.lo; i <= c.hi; ++i) peak = std::max(peak, c.v[i]);
        if (!(peak > 0.0)) {
            c = Chain::zero();
            return;
        }
        const double floor = peak * kSupportFloor;
        while (c.lo < c.hi && c.v[c.lo] <= floor) ++c.lo;
        while (c.hi > c.lo && c.v[c.hi] <= floor) --c.hi;
    }

    void step_k(int k, std::vector<SinrAccum>& acc) {
        const int L = ws_.num_sites;
        // Candidates whose quadrature window covers this node.
        active_cands_.clear();
        for (int i = 0; i < L; ++i)
            if (mask_[i] && ws_.candidate[i] && k >= ws_.act_lo[i] && k <= ws_.act_hi[i] &&
                ws_.f[i][k] > 0.0)
                active_cands_.push_back(i);
        if (active_cands_.empty()) return;

        // Factors still affected by truncation at this node, in fixed
        // descending-mean order.
        actives_.clear();
        for (int j : ws_.order)
            if (ws_.hi[j] > k) actives_.push_back(j);
        const int An = static_cast<int>(actives_.size());

        // Half weight at the cut node while this P_S is processed.
        for (int j : actives_)
            if (ws_.lo[j] <= k) fw_[j][k] *= 0.5;

        // Prefix/suffix chains over the active factors.
        pre_.assign(An + 1, Chain::identity());
        suf_.assign(An + 1, Chain::identity());
        for (int t = 0; t < An; ++t) pre_[t + 1] = conv_site(pre_[t], actives_[t], k);
        for (int t = An - 1; t >= 0; --t) suf_[t] = conv_site(suf_[t + 1], actives_[t], k);

        for (int i : active_cands_) {
            int pos = An;
            for (int t = 0; t < An; ++t)
                if (actives_[t] == i) {
                    pos = t;
                    break;
                }
            Chain loo = (pos == An) ? pre_[An]
                                    : conv_pair(pre_[pos], suf_[pos + 1]);
            Chain t_i = conv_pair(loo, frozen_[i]);
            accumulate(k, i, t_i, acc[i]);
        }

        for (int j : actives_)
            if (ws_.lo[j] <= k) fw_[j][k] *= 2.0;
    }

    void accumulate(int k, int i, const Chain& t_i, SinrAccum& out) {
        if (t_i.kind == Chain::Kind::Zero) return;
        const double c = ws_.step * ws_.f[i][k];
        const double sshift = ws_.serve_shift[i];
        const int base = ws_.n - 1;
        if (!std::isfinite(sshift)) {
            if (t_i.kind == Chain::Kind::Grid) {
                // x index m = k - u over the chain support.
                const int len = t_i.hi - t_i.lo + 1;
                out.h.segment(base + k - t_i.hi, len) += c * t_i.v.segment(t_i.lo, len).reverse();
            } else if (t_i.kind == Chain::Kind::Point) {
                splat(out, (ws_.g.value(k) - t_i.point) / ws_.step, c * t_i.mass);
            } else {
                throw numerical_error("best server: empty interference and noise");
            }
            return;
        }
        // Serving site's weaker sectors: point power at P_S + shift enters
        // the denominator.
        const double q = ws_.g.value(k) + sshift;
        if (t_i.kind == Chain::Kind::Point) {
            splat(out, (ws_.g.value(k) - db_sum(t_i.point, q)) / ws_.step, c * t_i.mass);
            return;
        }
        if (t_i.kind == Chain::Kind::Identity) {
            splat(out, -sshift / ws_.step, c * t_i.mass);
            return;
        }
        const double ql = pow10_db(q);
        // u = value of the combined denominator; x = v_k - u.
        const int u_lo = std::max(0, static_cast<int>(std::floor(
                             ws_.g.position(db_sum(ws_.g.value(t_i.lo), q)))));
        const int u_hi = std::min(ws_.n - 1, static_cast<int>(std::ceil(ws_.g.position(
                             db_sum(ws_.g.value(t_i.hi), q)))) );
        for (int u = u_lo; u <= u_hi; ++u) {
            const double diff = pow10_db(ws_.g.value(u)) - ql;
            if (diff <= 0.0) continue;
            const double jac = pow10_db(ws_.g.value(u)) / diff;
            const double pos = ws_.g.position(db_of(diff));
            if (pos < t_i.lo || pos > t_i.hi) continue;
            const int kk = std::min(static_cast<int>(pos), t_i.hi - 1);
            double val;
            if (kk < t_i.lo)
                val = t_i.v[t_i.lo];
            else {
                const double w = pos - kk;
                val = t_i.v[kk] * (1.0 - w) + t_i.v[kk + 1] * w;
            }
            out.h[ws_.n - 1 + k - u] += c * val * jac;
        }
    }

    void splat(SinrAccum& out, double m_pos, double mass) const {
        const int m0 = static_cast<int>(std::floor(m_pos));
        const double w = m_pos - m0;
        const int base = ws_.n - 1;
        if (m0 + base >= 0 && m0 + base < out.h.size())
            out.h[m0 + base] += mass * (1.0 - w) / ws_.step;
        if (m0 + 1 + base >= 0 && m0 + 1 + base < out.h.size())
            out.h[m0 + 1 + base] += mass * w / ws_.step;
    }

    std::vector<int> active_cands_, actives_;
    std::vector<Chain> pre_, suf_;
};

}  // namespace

std::vector<SinrAccum> run_best_server_sweep(const Workspace& ws,
                                             const std::vector<char>& candidate_mask,
                                             int n_workers) {
    const int L = ws.num_sites;
    int k_lo = ws.n, k_hi = -1;
    for (int i = 0; i < L; ++i) {
        if (!candidate_mask[i] || !ws.candidate[i]) continue;
        k_lo = std::min(k_lo, ws.act_lo[i]);
        k_hi = std::max(k_hi, ws.act_hi[i]);
    }
    std::vector<SinrAccum> total(L, SinrAccum(ws.n));
    if (k_hi < k_lo) return total;

    const int span = k_hi - k_lo + 1;
    const int n_blocks = std::min(kSweepBlocks, span);
    std::vector<std::vector<SinrAccum>> partial(n_blocks);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const int b0 = k_lo + static_cast<int>(static_cast<long>(span) * b / n_blocks);
            const int b1 = k_lo + static_cast<int>(static_cast<long>(span) * (b + 1) / n_blocks) - 1;
            Sweep sweep(ws, candidate_mask);
            partial[b] = sweep.run(b0, b1);
        }
    };
    const int workers = std::max(1, std::min(n_workers, n_blocks));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (int b = 0; b < n_blocks; ++b)
        for (int i = 0; i < L; ++i) total[i].h += partial[b][i].h;
    return total;
}

GriddedDist accum_to_dist(const Workspace& ws, const Eigen::ArrayXd& h) {
    int a = 0, b = static_cast<int>(h.size()) - 1;
    while (a < b && h[a] == 0.0) ++a;
    while (b > a && h[b] == 0.0) --b;
    if (h[a] == 0.0 && h[b] == 0.0) return GriddedDist::zero();
    DbGrid sg;
    sg.step_db = ws.step;
    sg.min_db = (a - (ws.n - 1)) * ws.step;
    sg.n = b - a + 1;
    GriddedDist out = GriddedDist::gridded(sg);
    out.density = h.segment(a, sg.n);
    out.lo = 0;
    out.hi = sg.n - 1;
    out.recompute_mass();
    return out;
}

}  // namespace sinrlab::detail
