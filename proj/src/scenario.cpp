#include "sinrlab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sinrlab/version.hpp"

namespace sinrlab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
    throw config_error("config: " + ctx + ": " + msg);
}

void check_keys(const json& j, const std::string& ctx, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(ctx, "expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) fail(ctx, "unknown key '" + key + "'");
}

double get_num(const json& j, const std::string& ctx, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) fail(ctx, std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& ctx, const char* key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) fail(ctx, std::string("'") + key + "' must be an integer");
    return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& ctx, const char* key, bool dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_boolean()) fail(ctx, std::string("'") + key + "' must be a boolean");
    return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& ctx, const char* key,
                    const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_string()) fail(ctx, std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& ctx, const char* key,
                                 std::vector<double> dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_array()) fail(ctx, std::string("'") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) fail(ctx, std::string("'") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

std::string association_mode_name(AssociationMode mode, int fixed_site) {
    switch (mode) {
        case AssociationMode::BestServer:
            return "best-server";
        case AssociationMode::ShortestDistance:
            return "distance";
        case AssociationMode::SmallestPathLoss:
            return "pathloss";
        case AssociationMode::FixedSite:
            return "site:" + std::to_string(fixed_site);
    }
    return "best-server";
}

void parse_association_mode(const std::string& text, AssociationMode& mode, int& fixed_site) {
    if (text == "best-server") {
        mode = AssociationMode::BestServer;
    } else if (text == "distance") {
        mode = AssociationMode::ShortestDistance;
    } else if (text == "pathloss") {
        mode = AssociationMode::SmallestPathLoss;
    } else if (text.rfind("site:", 0) == 0) {
        mode = AssociationMode::FixedSite;
        try {
            fixed_site = std::stoi(text.substr(5));
        } catch (...) {
            throw config_error("config: association: bad site index in '" + text + "'");
        }
    } else {
        throw config_error("config: association: unknown mode '" + text +
                           "' (best-server|distance|pathloss|site:N)");
    }
}

Deployment ScenarioConfig::build_deployment() const {
    Sector tmpl;
    tmpl.transmit_power_dbm = tx_power_dbm;
    tmpl.antenna = antenna;

    Deployment dep;
    if (preset == "paper12") {
        dep = build_paper12(isd_m, tmpl, sectors_per_site, boresight_offset_deg).deployment;
    } else if (preset == "hex") {
        dep = build_hex_grid(rings, isd_m, tmpl, sectors_per_site, boresight_offset_deg);
    } else if (preset == "explicit") {
        if (explicit_sites.empty()) throw config_error("config: explicit preset without sites");
        for (const auto& es : explicit_sites) {
            Site site;
            site.position = es.position;
            for (const auto& sec : es.sectors) {
                Sector s = tmpl;
                s.transmit_power_dbm = sec.tx_power_dbm;
                s.antenna.boresight_azimuth_deg = sec.azimuth_deg;
                site.sectors.push_back(s);
            }
            if (site.sectors.empty()) throw config_error("config: site without sectors");
            dep.sites.push_back(site);
        }
    } else {
        throw config_error("config: unknown preset '" + preset + "'");
    }
    dep.propagation = propagation;
    dep.ue_antenna_gain_dbi = ue_antenna_gain_dbi;
    return dep;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw config_error("config: " + path + ": " + e.what());
    }
    return from_json(j);
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    ScenarioConfig c;
    check_keys(j, "top level",
               {"config_version", "deployment", "propagation", "antenna", "ue_antenna_gain_dbi",
                "tx_power_dbm", "shadowing", "noise", "grid", "association", "targets", "report",
                "output_dir", "meta"});
    const int version = get_int(j, "top level", "config_version", -1);
    if (version != kConfigVersion)
        fail("top level", "config_version must be " + std::to_string(kConfigVersion));

    if (j.contains("deployment")) {
        const json& d = j["deployment"];
        check_keys(d, "deployment",
                   {"preset", "rings", "isd_m", "sectors_per_site", "boresight_offset_deg",
                    "sites"});
        c.preset = get_str(d, "deployment", "preset", "hex");
        c.rings = get_int(d, "deployment", "rings", 1);
        c.isd_m = get_num(d, "deployment", "isd_m", 500.0);
        c.sectors_per_site = get_int(d, "deployment", "sectors_per_site", 3);
        c.boresight_offset_deg = get_num(d, "deployment", "boresight_offset_deg", 30.0);
        if (d.contains("sites")) {
            if (!d["sites"].is_array()) fail("deployment", "'sites' must be an array");
            for (const auto& s : d["sites"]) {
                check_keys(s, "deployment.sites[]", {"x_m", "y_m", "sectors"});
                ExplicitSite site;
                site.position = {get_num(s, "site", "x_m", 0.0), get_num(s, "site", "y_m", 0.0)};
                if (s.contains("sectors")) {
                    for (const auto& sec : s["sectors"]) {
                        check_keys(sec, "deployment.sites[].sectors[]",
                                   {"tx_power_dbm", "azimuth_deg"});
                        ExplicitSector xs;
                        xs.tx_power_dbm = get_num(sec, "sector", "tx_power_dbm", 49.0);
                        xs.azimuth_deg = get_num(sec, "sector", "azimuth_deg", 0.0);
                        site.sectors.push_back(xs);
                    }
                }
                c.explicit_sites.push_back(site);
            }
        }
    }

    if (j.contains("propagation")) {
        const json& p = j["propagation"];
        check_keys(p, "propagation",
                   {"pathloss_intercept_db", "pathloss_exponent_db_per_decade",
                    "reference_distance_km", "carrier_freq_hz", "bandwidth_hz", "min_distance_m"});
        c.propagation.pathloss_intercept_db =
            get_num(p, "propagation", "pathloss_intercept_db", 128.1);
        c.propagation.pathloss_exponent_coeff =
            get_num(p, "propagation", "pathloss_exponent_db_per_decade", 37.6);
        c.propagation.reference_distance_km =
            get_num(p, "propagation", "reference_distance_km", 1.0);
        c.propagation.carrier_freq_hz = get_num(p, "propagation", "carrier_freq_hz", 2.0e9);
        c.propagation.bandwidth_hz = get_num(p, "propagation", "bandwidth_hz", 20.0e6);
        c.propagation.min_distance_m = get_num(p, "propagation", "min_distance_m", 35.0);
        if (!(c.propagation.pathloss_exponent_coeff > 0.0))
            fail("propagation", "pathloss exponent must be positive");
        if (!(c.propagation.bandwidth_hz > 0.0)) fail("propagation", "bandwidth must be positive");
    }

    if (j.contains("antenna")) {
        const json& a = j["antenna"];
        check_keys(a, "antenna",
                   {"kind", "max_gain_dbi", "horizontal_3db_deg", "vertical_3db_deg",
                    "max_attenuation_db", "sidelobe_attenuation_db", "downtilt_deg", "bs_height_m",
                    "ue_height_m"});
        const std::string kind = get_str(a, "antenna", "kind", "sector3d");
        if (kind == "omni")
            c.antenna.kind = AntennaPattern::Kind::Omni;
        else if (kind == "sector3d")
            c.antenna.kind = AntennaPattern::Kind::Sector3d;
        else
            fail("antenna", "kind must be omni or sector3d");
        c.antenna.max_gain_dbi = get_num(a, "antenna", "max_gain_dbi", 14.0);
        c.antenna.horizontal_3db_beamwidth_deg = get_num(a, "antenna", "horizontal_3db_deg", 70.0);
        c.antenna.vertical_3db_beamwidth_deg = get_num(a, "antenna", "vertical_3db_deg", 10.0);
        c.antenna.max_attenuation_db = get_num(a, "antenna", "max_attenuation_db", 25.0);
        c.antenna.sidelobe_attenuation_db = get_num(a, "antenna", "sidelobe_attenuation_db", 20.0);
        c.antenna.downtilt_deg = get_num(a, "antenna", "downtilt_deg", 15.0);
        c.antenna.bs_height_m = get_num(a, "antenna", "bs_height_m", 32.0);
        c.antenna.ue_height_m = get_num(a, "antenna", "ue_height_m", 1.5);
        if (!(c.antenna.horizontal_3db_beamwidth_deg > 0.0) ||
            !(c.antenna.vertical_3db_beamwidth_deg > 0.0))
            fail("antenna", "beamwidths must be positive");
    } else if (c.sectors_per_site == 1) {
        c.antenna.kind = AntennaPattern::Kind::Omni;
    }

    c.ue_antenna_gain_dbi = get_num(j, "top level", "ue_antenna_gain_dbi", 0.0);
    c.tx_power_dbm = get_num(j, "top level", "tx_power_dbm", 49.0);

    if (j.contains("shadowing")) {
        const json& s = j["shadowing"];
        check_keys(s, "shadowing", {"sigma_db", "rho_intersite"});
        c.shadowing.sigma_db = get_num(s, "shadowing", "sigma_db", 8.0);
        c.shadowing.rho_intersite = get_num(s, "shadowing", "rho_intersite", 0.5);
        if (c.shadowing.sigma_db < 0.0) fail("shadowing", "sigma_db must be >= 0");
        if (c.shadowing.rho_intersite < 0.0 || c.shadowing.rho_intersite > 1.0)
            fail("shadowing", "rho_intersite must be in [0, 1]");
    }

    if (j.contains("noise")) {
        const json& n = j["noise"];
        check_keys(n, "noise", {"enabled", "thermal_density_dbm_per_hz", "noise_figure_db"});
        c.noise.enabled = get_bool(n, "noise", "enabled", true);
        c.noise.thermal_density_dbm_per_hz =
            get_num(n, "noise", "thermal_density_dbm_per_hz", -174.0);
        c.noise.noise_figure_db = get_num(n, "noise", "noise_figure_db", 9.0);
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "grid", {"step_db", "span_below_db", "span_above_db"});
        c.grid.step_db = get_num(g, "grid", "step_db", 0.1);
        c.grid.span_below_db = get_num(g, "grid", "span_below_db", 0.0);
        c.grid.span_above_db = get_num(g, "grid", "span_above_db", 0.0);
        if (!(c.grid.step_db > 0.0)) fail("grid", "step_db must be positive");
    }

    parse_association_mode(get_str(j, "top level", "association", "best-server"), c.mode,
                           c.fixed_site);

    if (j.contains("targets")) {
        const json& t = j["targets"];
        check_keys(t, "targets", {"points", "area"});
        if (t.contains("points")) {
            if (!t["points"].is_array()) fail("targets", "'points' must be an array");
            for (const auto& p : t["points"]) {
                check_keys(p, "targets.points[]", {"name", "x_m", "y_m"});
                PointTarget pt;
                pt.name = get_str(p, "point", "name",
                                  "p" + std::to_string(c.points.size()));
                pt.position = {get_num(p, "point", "x_m", 0.0), get_num(p, "point", "y_m", 0.0)};
                c.points.push_back(pt);
            }
        }
        if (t.contains("area")) {
            const json& a = t["area"];
            check_keys(a, "targets.area", {"polygon", "spacing_m"});
            if (!a.contains("polygon") || !a["polygon"].is_array())
                fail("targets.area", "'polygon' must be an array of [x, y] pairs");
            for (const auto& v : a["polygon"]) {
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    fail("targets.area", "'polygon' entries must be [x, y] pairs");
                c.area.polygon.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            c.area.spacing_m = get_num(a, "targets.area", "spacing_m", 10.0);
            c.has_area = true;
        }
    }

    if (j.contains("report")) {
        const json& r = j["report"];
        check_keys(r, "report", {"outage_thresholds_db", "probe_levels"});
        c.outage_thresholds_db =
            get_num_list(r, "report", "outage_thresholds_db", c.outage_thresholds_db);
        c.probe_levels = get_num_list(r, "report", "probe_levels", c.probe_levels);
    }

    c.output_dir = get_str(j, "top level", "output_dir", "out");

    // The bundled scenario fills in its canonical targets when none are given.
    if (c.preset == "paper12" && c.points.empty() && !c.has_area) {
        const double a = c.isd_m;
        const double h = 0.5 * std::sqrt(3.0) * a;
        const Vec2 s5{1.5 * a, h}, s6{2.5 * a, h}, s10{2.0 * a, 2.0 * h};
        const Vec2 centroid{2.0 * a, 4.0 * h / 3.0};
        auto towards = [](const Vec2& from, const Vec2& to, double dist) {
            const double len = std::hypot(to.x - from.x, to.y - from.y);
            return Vec2{from.x + (to.x - from.x) * dist / len,
                        from.y + (to.y - from.y) * dist / len};
        };
        c.points.push_back({"A", towards(s5, centroid, 115.0)});
        c.points.push_back({"B", {0.5 * (s5.x + s6.x), 0.5 * (s5.y + s6.y)}});
        c.points.push_back({"C", towards(s5, centroid, 0.75 * std::hypot(centroid.x - s5.x,
                                                                          centroid.y - s5.y))});
        c.points.push_back({"D", centroid});
        c.area.polygon = {s5, s6, s10};
        c.area.spacing_m = 10.0;
        c.has_area = true;
    }
    return c;
}

json ScenarioConfig::to_json() const {
    json j;
    j["config_version"] = kConfigVersion;
    json d;
    d["preset"] = preset;
    d["rings"] = rings;
    d["isd_m"] = isd_m;
    d["sectors_per_site"] = sectors_per_site;
    d["boresight_offset_deg"] = boresight_offset_deg;
    if (!explicit_sites.empty()) {
        json sites = json::array();
        for (const auto& s : explicit_sites) {
            json js;
            js["x_m"] = s.position.x;
            js["y_m"] = s.position.y;
            json sectors = json::array();
            for (const auto& sec : s.sectors)
                sectors.push_back({{"tx_power_dbm", sec.tx_power_dbm},
                                   {"azimuth_deg", sec.azimuth_deg}});
            js["sectors"] = sectors;
            sites.push_back(js);
        }
        d["sites"] = sites;
    }
    j["deployment"] = d;
    j["propagation"] = {{"pathloss_intercept_db", propagation.pathloss_intercept_db},
                        {"pathloss_exponent_db_per_decade", propagation.pathloss_exponent_coeff},
                        {"reference_distance_km", propagation.reference_distance_km},
                        {"carrier_freq_hz", propagation.carrier_freq_hz},
                        {"bandwidth_hz", propagation.bandwidth_hz},
                        {"min_distance_m", propagation.min_distance_m}};
    j["antenna"] = {{"kind", antenna.kind == AntennaPattern::Kind::Omni ? "omni" : "sector3d"},
                    {"max_gain_dbi", antenna.max_gain_dbi},
                    {"horizontal_3db_deg", antenna.horizontal_3db_beamwidth_deg},
                    {"vertical_3db_deg", antenna.vertical_3db_beamwidth_deg},
                    {"max_attenuation_db", antenna.max_attenuation_db},
                    {"sidelobe_attenuation_db", antenna.sidelobe_attenuation_db},
                    {"downtilt_deg", antenna.downtilt_deg},
                    {"bs_height_m", antenna.bs_height_m},
                    {"ue_height_m", antenna.ue_height_m}};
    j["ue_antenna_gain_dbi"] = ue_antenna_gain_dbi;
    j["tx_power_dbm"] = tx_power_dbm;
    j["shadowing"] = {{"sigma_db", shadowing.sigma_db},
                      {"rho_intersite", shadowing.rho_intersite}};
    j["noise"] = {{"enabled", noise.enabled},
                  {"thermal_density_dbm_per_hz", noise.thermal_density_dbm_per_hz},
                  {"noise_figure_db", noise.noise_figure_db}};
    j["grid"] = {{"step_db", grid.step_db},
                 {"span_below_db", grid.span_below_db},
                 {"span_above_db", grid.span_above_db}};
    j["association"] = association_mode_name(mode, fixed_site);
    json t;
    json pts = json::array();
    for (const auto& p : points)
        pts.push_back({{"name", p.name}, {"x_m", p.position.x}, {"y_m", p.position.y}});
    t["points"] = pts;
    if (has_area) {
        json poly = json::array();
        for (const auto& v : area.polygon) poly.push_back({v.x, v.y});
        t["area"] = {{"polygon", poly}, {"spacing_m", area.spacing_m}};
    }
    j["targets"] = t;
    j["report"] = {{"outage_thresholds_db", outage_thresholds_db},
                   {"probe_levels", probe_levels}};
    j["output_dir"] = output_dir;
    return j;
}

}  // namespace sinrlab
