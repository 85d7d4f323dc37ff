#pragma once

#include <cstdint>
#include <vector>

#include "sinrlab/deployment.hpp"
#include "sinrlab/model.hpp"

namespace sinrlab {

// Counter-based Philox4x32-10 generator: 128-bit counter, 64-bit key. Each
// sample index owns an independent substream, so draws are reproducible and
// order-independent across workers.
class PhiloxRng {
  public:
    PhiloxRng(std::uint64_t seed, std::uint64_t sample_index)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(sample_index)),
          ctr3_(static_cast<std::uint32_t>(sample_index >> 32)) {}

    // Uniform double in (0, 1].
    double uniform();
    // Standard normal via Box-Muller (two uniforms per pair, cached).
    double normal();

  private:
    void refill();
    std::uint32_t key0_, key1_;
    std::uint32_t ctr0_ = 0, ctr1_ = 0;  // block counter
    std::uint32_t ctr2_, ctr3_;          // sample index
    std::uint32_t out_[4] = {};
    int avail_ = 0;
};

struct SimConfig {
    std::uint64_t num_samples = 10'000'000;
    std::uint64_t rng_seed = 1;
    AssociationMode mode = AssociationMode::BestServer;
    int fixed_site = 0;
    std::vector<double> probe_levels = {1e-2, 1e-3, 1e-4, 1e-5};
};

struct TailProbe {
    double level = 0.0;         // requested outage probability
    double threshold_db = 0.0;  // empirical quantile at the level
    double empirical = 0.0;     // k/n at the threshold
    double ci_low = 0.0;        // Wilson 99% interval
    double ci_high = 0.0;
};

struct EmpiricalCdf {
    std::vector<double> samples;  // sorted SINR dB
    std::vector<int> serving;     // serving site per sample (same order as draws)
    std::vector<TailProbe> probes;

    double cdf(double x_db) const;
    double quantile(double p) const;
};

// One SINR realization: site shadowing split into the common and the
// per-link component, serving chosen per mode, all other sectors plus the
// thermal noise in the denominator. Returns the SINR in dB and the serving
// site via out parameter.
double sample_sinr(const Deployment& dep, const ShadowingModel& shadowing,
                   const NoiseModel& noise, const Vec2& ue_position, PhiloxRng& rng,
                   AssociationMode mode = AssociationMode::BestServer, int fixed_site = 0,
                   int* serving_site = nullptr);

EmpiricalCdf run(const SimConfig& sim, const Deployment& dep, const ShadowingModel& shadowing,
                 const NoiseModel& noise, const Vec2& ue_position);

// Wilson score interval for k successes out of n at 99% confidence.
void wilson_interval(std::uint64_t k, std::uint64_t n, double& lo, double& hi);

// One-sample Kolmogorov-Smirnov statistic of the empirical CDF against the
// model distribution.
double ks_distance(const EmpiricalCdf& empirical, const SinrDistribution& model);
double ks_distance(const std::vector<double>& sorted_samples, const GriddedDist& model);

}  // namespace sinrlab
