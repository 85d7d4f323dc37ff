#include "sinrlab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sinrlab {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

void PhiloxRng::refill() {
    std::uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c0, hi0, lo0);
        mulhilo(kPhiloxM1, c2, hi1, lo1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    avail_ = 4;
    if (++ctr0_ == 0) ++ctr1_;
}

double PhiloxRng::uniform() {
    if (avail_ < 2) refill();
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(out_[4 - avail_]) << 32) | out_[5 - avail_];
    avail_ -= 2;
    // (0, 1]: never 0, so logs are safe.
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double PhiloxRng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sample_sinr(const Deployment& dep, const ShadowingModel& shadowing,
                   const NoiseModel& noise, const Vec2& ue_position, PhiloxRng& rng,
                   AssociationMode mode, int fixed_site, int* serving_site) {
    const int L = static_cast<int>(dep.sites.size());
    const double sig = shadowing.sigma_db;
    const double sr = std::sqrt(shadowing.rho_intersite);
    const double se = std::sqrt(1.0 - shadowing.rho_intersite);

    // xi is common to all links, eta is per site; sectors share the site's
    // shadowing.
    const double xi = rng.normal();
    double best_power = -1e300;
    int best_site = 0, best_sector = 0;
    static thread_local std::vector<double> site_shadow;
    site_shadow.assign(L, 0.0);
    for (int j = 0; j < L; ++j) {
        const double eta = rng.normal();
        site_shadow[j] = sig * (sr * xi + se * eta);
    }
    for (int j = 0; j < L; ++j) {
        const int s_count = static_cast<int>(dep.sites[j].sectors.size());
        for (int s = 0; s < s_count; ++s) {
            const double p = mean_rx_power_dbm(dep, ue_position, j, s) + site_shadow[j];
            if (p > best_power) {  // ties keep the lowest index
                best_power = p;
                best_site = j;
                best_sector = s;
            }
        }
    }
    int serving = best_site;
    int serving_sector = best_sector;
    if (mode != AssociationMode::BestServer) {
        switch (mode) {
            case AssociationMode::FixedSite:
                serving = fixed_site;
                break;
            case AssociationMode::ShortestDistance: {
                serving = 0;
                double best_d = 1e300;
                for (int j = 0; j < L; ++j) {
                    const double d = std::hypot(ue_position.x - dep.sites[j].position.x,
                                                ue_position.y - dep.sites[j].position.y);
                    if (d < best_d) {
                        best_d = d;
                        serving = j;
                    }
                }
                break;
            }
            case AssociationMode::SmallestPathLoss: {
                serving = 0;
                double best_pl = 1e300;
                for (int j = 0; j < L; ++j) {
                    const double d = std::hypot(ue_position.x - dep.sites[j].position.x,
                                                ue_position.y - dep.sites[j].position.y);
                    const double pl = path_loss_db(dep.propagation, d);
                    if (pl < best_pl) {
                        best_pl = pl;
                        serving = j;
                    }
                }
                break;
            }
            default:
                break;
        }
        serving_sector = strongest_sector(dep, ue_position, serving);
    }

    const double serving_power_dbm =
        mean_rx_power_dbm(dep, ue_position, serving, serving_sector) + site_shadow[serving];
    double denom_lin = 0.0;
    if (noise.enabled)
        denom_lin += std::pow(10.0, 0.1 * noise.power_dbm(dep.propagation.bandwidth_hz));
    for (int j = 0; j < L; ++j) {
        const int s_count = static_cast<int>(dep.sites[j].sectors.size());
        for (int s = 0; s < s_count; ++s) {
            if (j == serving && s == serving_sector) continue;
            const double p = mean_rx_power_dbm(dep, ue_position, j, s) + site_shadow[j];
            denom_lin += std::pow(10.0, 0.1 * p);
        }
    }
    if (serving_site) *serving_site = serving;
    if (!(denom_lin > 0.0))
        throw numerical_error("sample_sinr: empty denominator");
    return serving_power_dbm - 10.0 * std::log10(denom_lin);
}

double EmpiricalCdf::cdf(double x_db) const {
    const auto it = std::upper_bound(samples.begin(), samples.end(), x_db);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

double EmpiricalCdf::quantile(double p) const {
    if (samples.empty()) throw std::invalid_argument("EmpiricalCdf::quantile: no samples");
    const std::uint64_t n = samples.size();
    std::uint64_t k = static_cast<std::uint64_t>(std::ceil(p * n));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return samples[k - 1];
}

void wilson_interval(std::uint64_t k, std::uint64_t n, double& lo, double& hi) {
    const double z = 2.5758293035489004;  // 99.5th percentile of the standard normal
    const double z2 = z * z;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double denom = 1.0 + z2 / nn;
    const double center = phat + z2 / (2.0 * nn);
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
    lo = std::max(0.0, (center - half) / denom);
    hi = std::min(1.0, (center + half) / denom);
}

EmpiricalCdf run(const SimConfig& sim, const Deployment& dep, const ShadowingModel& shadowing,
                 const NoiseModel& noise, const Vec2& ue_position) {
    if (sim.num_samples < 1) throw std::invalid_argument("run: num_samples must be >= 1");
    EmpiricalCdf out;
    out.samples.resize(sim.num_samples);
    out.serving.resize(sim.num_samples);

    const std::uint64_t n = sim.num_samples;
    std::atomic<std::uint64_t> next{0};
    constexpr std::uint64_t kChunk = 65536;
    auto work = [&]() {
        for (;;) {
            const std::uint64_t begin = next.fetch_add(kChunk);
            if (begin >= n) return;
            const std::uint64_t end = std::min(n, begin + kChunk);
            for (std::uint64_t idx = begin; idx < end; ++idx) {
                PhiloxRng rng(sim.rng_seed, idx);
                int serving = 0;
                out.samples[idx] = sample_sinr(dep, shadowing, noise, ue_position, rng,
                                               sim.mode, sim.fixed_site, &serving);
                out.serving[idx] = serving;
            }
        }
    };
    const int workers = std::max(1, worker_count());
    if (workers == 1 || n < 2 * kChunk) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::sort(out.samples.begin(), out.samples.end());

    for (double level : sim.probe_levels) {
        if (!(level > 0.0) || !(level < 1.0)) continue;
        TailProbe probe;
        probe.level = level;
        probe.threshold_db = out.quantile(level);
        const auto it =
            std::upper_bound(out.samples.begin(), out.samples.end(), probe.threshold_db);
        const std::uint64_t k = it - out.samples.begin();
        probe.empirical = static_cast<double>(k) / static_cast<double>(n);
        wilson_interval(k, n, probe.ci_low, probe.ci_high);
        out.probes.push_back(probe);
    }
    return out;
}

double ks_distance(const std::vector<double>& sorted_samples, const GriddedDist& model) {
    if (sorted_samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    const std::uint64_t n = sorted_samples.size();
    // Precompute the model CDF once; evaluate by interpolation.
    Eigen::ArrayXd cum;
    if (model.is_gridded()) cum = cumulative_trapezoid(model);
    double d = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = sorted_samples[i];
        double fm;
        if (model.is_gridded()) {
            const double pos = model.grid.position(x);
            if (pos <= model.lo)
                fm = 0.0;
            else if (pos >= model.hi)
                fm = model.mass;
            else {
                const int k = static_cast<int>(pos);
                const double w = pos - k;
                fm = cum[k] * (1.0 - w) + cum[k + 1] * w;
            }
        } else if (model.is_point()) {
            fm = x >= model.point_db ? model.mass : 0.0;
        } else {
            fm = 0.0;
        }
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(fm - lo), std::abs(fm - hi)));
    }
    return d;
}

double ks_distance(const EmpiricalCdf& empirical, const SinrDistribution& model) {
    return ks_distance(empirical.samples, model.dist);
}

}  // namespace sinrlab
