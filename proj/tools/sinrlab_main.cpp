// Command-line front end: analyze (model CDFs), simulate (Monte Carlo),
// compare (model vs simulation with tail probes), area (aggregate over a
// polygon). Every run writes a manifest that reproduces it byte-for-byte.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "sinrlab/convolve.hpp"
#include "sinrlab/montecarlo.hpp"
#include "sinrlab/scenario.hpp"
#include "sinrlab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sinrlab;

namespace {

std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 11);
    return std::string(buf, res.ptr);
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << content;
    }
    fs::rename(tmp, path);
}

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<double> grid_step;
    std::optional<std::string> mode;
};

ScenarioConfig load_config(const Options& opt) {
    ScenarioConfig cfg = ScenarioConfig::from_file(opt.config_path);
    if (opt.out_dir.size()) cfg.output_dir = opt.out_dir;
    if (opt.grid_step) cfg.grid.step_db = *opt.grid_step;
    if (opt.mode) parse_association_mode(*opt.mode, cfg.mode, cfg.fixed_site);
    return cfg;
}

void write_manifest(const ScenarioConfig& cfg, const std::string& command,
                    std::uint64_t seed, std::uint64_t samples) {
    json m = cfg.to_json();
    m["meta"] = {{"tool", "sinrlab"},
                 {"version", kVersion},
                 {"command", command},
                 {"seed", seed},
                 {"samples", samples}};
    write_atomic(fs::path(cfg.output_dir) / "manifest.json", m.dump(2) + "\n");
}

std::string model_curve_csv(const GriddedDist& dist) {
    std::string s = "sinr_db,pdf,cdf\n";
    Eigen::ArrayXd cum = cumulative_trapezoid(dist);
    for (int i = dist.lo; i <= dist.hi; ++i) {
        s += fmt(dist.grid.value(i));
        s += ',';
        s += fmt(dist.density[i]);
        s += ',';
        s += fmt(cum[i]);
        s += '\n';
    }
    return s;
}

json summary_entry(const ScenarioConfig& cfg, const std::string& name, const Vec2& pos,
                   const SinrDistribution& r) {
    json e;
    e["target"] = name;
    e["x_m"] = pos.x;
    e["y_m"] = pos.y;
    e["median_db"] = quantile(r.dist, 0.5 * r.dist.mass);
    e["p05_db"] = quantile(r.dist, 0.05 * r.dist.mass);
    json out;
    for (double thr : cfg.outage_thresholds_db) out[fmt(thr)] = outage(r.dist, thr);
    e["outage"] = out;
    json w = json::array();
    for (int i = 0; i < r.assoc_prob.size(); ++i) w.push_back(r.assoc_prob[i]);
    e["assoc_prob"] = w;
    e["pdf_mass"] = r.dist.mass;
    return e;
}

SinrDistribution analyze_point(const ScenarioConfig& cfg, const Deployment& dep,
                               const Vec2& pos) {
    LinkEnsemble ens = build_link_ensemble(dep, cfg.shadowing, cfg.noise, pos, cfg.grid);
    return cfg.mode == AssociationMode::BestServer
               ? sinr_best_server(ens)
               : sinr_fixed_association(ens, cfg.mode, cfg.fixed_site);
}

int cmd_analyze(const Options& opt) {
    ScenarioConfig cfg = load_config(opt);
    if (cfg.points.empty()) throw config_error("analyze: no point targets in config");
    const Deployment dep = cfg.build_deployment();
    json summary = json::array();
    for (const auto& pt : cfg.points) {
        SinrDistribution r = analyze_point(cfg, dep, pt.position);
        write_atomic(fs::path(cfg.output_dir) / ("model_" + pt.name + ".csv"),
                     model_curve_csv(r.dist));
        summary.push_back(summary_entry(cfg, pt.name, pt.position, r));
        std::cout << "analyze " << pt.name << ": median "
                  << quantile(r.dist, 0.5 * r.dist.mass) << " dB, mass " << r.dist.mass << "\n";
    }
    write_atomic(fs::path(cfg.output_dir) / "summary_model.json", summary.dump(2) + "\n");
    write_manifest(cfg, "analyze", 0, 0);
    return 0;
}

std::string empirical_csv(const EmpiricalCdf& emp, double step_db) {
    // Thresholds on the model lattice across the sample range, then the
    // configured tail probes.
    std::string s = "sinr_db_threshold,empirical_cdf,ci_low,ci_high\n";
    const double lo = emp.samples.front(), hi = emp.samples.back();
    const std::uint64_t n = emp.samples.size();
    const long k0 = std::lround(std::floor(lo / step_db));
    const long k1 = std::lround(std::ceil(hi / step_db));
    const long stride = std::max(1L, (k1 - k0) / 2000);
    for (long k = k0; k <= k1; k += stride) {
        const double x = k * step_db;
        const auto it = std::upper_bound(emp.samples.begin(), emp.samples.end(), x);
        const std::uint64_t cnt = it - emp.samples.begin();
        double ci_lo, ci_hi;
        wilson_interval(cnt, n, ci_lo, ci_hi);
        s += fmt(x);
        s += ',';
        s += fmt(static_cast<double>(cnt) / static_cast<double>(n));
        s += ',';
        s += fmt(ci_lo);
        s += ',';
        s += fmt(ci_hi);
        s += '\n';
    }
    return s;
}

int cmd_simulate(const Options& opt) {
    ScenarioConfig cfg = load_config(opt);
    if (cfg.points.empty()) throw config_error("simulate: no point targets in config");
    const Deployment dep = cfg.build_deployment();
    SimConfig sim;
    sim.rng_seed = opt.seed.value_or(1);
    sim.num_samples = opt.samples.value_or(1'000'000);
    sim.mode = cfg.mode;
    sim.fixed_site = cfg.fixed_site;
    sim.probe_levels = cfg.probe_levels;
    for (const auto& pt : cfg.points) {
        EmpiricalCdf emp = run(sim, dep, cfg.shadowing, cfg.noise, pt.position);
        write_atomic(fs::path(cfg.output_dir) / ("sim_" + pt.name + ".csv"),
                     empirical_csv(emp, cfg.grid.step_db));
        std::cout << "simulate " << pt.name << ": " << sim.num_samples << " samples, median "
                  << emp.quantile(0.5) << " dB\n";
    }
    write_manifest(cfg, "simulate", sim.rng_seed, sim.num_samples);
    return 0;
}

int cmd_compare(const Options& opt) {
    ScenarioConfig cfg = load_config(opt);
    if (cfg.points.empty()) throw config_error("compare: no point targets in config");
    const Deployment dep = cfg.build_deployment();
    SimConfig sim;
    sim.rng_seed = opt.seed.value_or(1);
    sim.num_samples = opt.samples.value_or(1'000'000);
    sim.mode = cfg.mode;
    sim.fixed_site = cfg.fixed_site;
    sim.probe_levels = cfg.probe_levels;

    bool all_pass = true;
    json report = json::array();
    for (const auto& pt : cfg.points) {
        SinrDistribution model = analyze_point(cfg, dep, pt.position);
        EmpiricalCdf emp = run(sim, dep, cfg.shadowing, cfg.noise, pt.position);
        const double ks = ks_distance(emp, model);

        json probes = json::array();
        std::string csv = "level,threshold_db,empirical,ci_low,ci_high,model,pass\n";
        bool point_pass = true;
        for (const auto& probe : emp.probes) {
            const double model_cdf = outage(model.dist, probe.threshold_db);
            const bool pass = model_cdf >= probe.ci_low && model_cdf <= probe.ci_high;
            point_pass = point_pass && pass;
            probes.push_back({{"level", probe.level},
                              {"threshold_db", probe.threshold_db},
                              {"empirical", probe.empirical},
                              {"ci_low", probe.ci_low},
                              {"ci_high", probe.ci_high},
                              {"model", model_cdf},
                              {"pass", pass}});
            csv += fmt(probe.level) + ',' + fmt(probe.threshold_db) + ',' +
                   fmt(probe.empirical) + ',' + fmt(probe.ci_low) + ',' + fmt(probe.ci_high) +
                   ',' + fmt(model_cdf) + ',' + (pass ? "1" : "0") + '\n';
        }
        write_atomic(fs::path(cfg.output_dir) / ("compare_" + pt.name + ".csv"), csv);
        report.push_back({{"target", pt.name},
                          {"ks_distance", ks},
                          {"probes", probes},
                          {"pass", point_pass}});
        all_pass = all_pass && point_pass;
        std::cout << "compare " << pt.name << ": KS " << ks << " -> "
                  << (point_pass ? "pass" : "FAIL") << "\n";
    }
    write_atomic(fs::path(cfg.output_dir) / "compare_summary.json", report.dump(2) + "\n");
    write_manifest(cfg, "compare", sim.rng_seed, sim.num_samples);
    return all_pass ? 0 : 1;
}

int cmd_area(const Options& opt) {
    ScenarioConfig cfg = load_config(opt);
    if (!cfg.has_area) throw config_error("area: no area target in config");
    const Deployment dep = cfg.build_deployment();
    SinrDistribution r =
        area_sinr(dep, cfg.shadowing, cfg.noise, cfg.area, cfg.mode, cfg.grid);
    write_atomic(fs::path(cfg.output_dir) / "model_area.csv", model_curve_csv(r.dist));
    json summary = json::array();
    summary.push_back(summary_entry(cfg, "area", r.location, r));
    write_atomic(fs::path(cfg.output_dir) / "summary_area.json", summary.dump(2) + "\n");
    write_manifest(cfg, "area", 0, 0);
    std::cout << "area: " << area_grid_points(cfg.area).size() << " locations, median "
              << quantile(r.dist, 0.5 * r.dist.mass) << " dB\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact downlink SINR distributions under log-normal shadowing with "
                 "best-server association, plus a Monte Carlo validator"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd, bool with_sim) {
        cmd->add_option("--config", opt.config_path, "scenario config JSON")->required();
        cmd->add_option("--out", opt.out_dir, "output directory (overrides config)");
        cmd->add_option("--grid-step", opt.grid_step, "grid step in dB (overrides config)");
        cmd->add_option("--mode", opt.mode,
                        "association mode: best-server|distance|pathloss|site:N");
        if (with_sim) {
            cmd->add_option("--seed", opt.seed, "RNG seed");
            cmd->add_option("--samples", opt.samples, "number of Monte Carlo samples");
        }
    };
    CLI::App* analyze = app.add_subcommand("analyze", "model SINR distribution per target");
    add_common(analyze, false);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo empirical CDF per target");
    add_common(simulate, true);
    CLI::App* compare = app.add_subcommand("compare", "model vs Monte Carlo with tail probes");
    add_common(compare, true);
    CLI::App* area = app.add_subcommand("area", "aggregate distribution over the area target");
    add_common(area, false);

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(opt);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
        if (app.got_subcommand(compare)) return cmd_compare(opt);
        if (app.got_subcommand(area)) return cmd_area(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
