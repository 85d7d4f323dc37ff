#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"  // vendored nlohmann/json

#include "sinrlab/deployment.hpp"
#include "sinrlab/model.hpp"

namespace sinrlab {

class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PointTarget {
    std::string name;
    Vec2 position;
};

// Full experiment description. Parsed from a versioned JSON file with a
// strict schema (unknown keys are rejected); defaults follow the bundled
// evaluation scenario. to_json() emits the fully resolved form used as the
// run manifest, which parses back to an identical config.
struct ScenarioConfig {
    // deployment
    std::string preset = "hex";  // "paper12" | "hex" | "explicit"
    int rings = 1;
    double isd_m = 500.0;
    int sectors_per_site = 3;
    double boresight_offset_deg = 30.0;
    struct ExplicitSector {
        double tx_power_dbm = 49.0;
        double azimuth_deg = 0.0;
    };
    struct ExplicitSite {
        Vec2 position;
        std::vector<ExplicitSector> sectors;
    };
    std::vector<ExplicitSite> explicit_sites;

    double tx_power_dbm = 49.0;
    PropagationModel propagation;
    AntennaPattern antenna;
    double ue_antenna_gain_dbi = 0.0;
    ShadowingModel shadowing;
    NoiseModel noise;
    GridSpec grid;
    AssociationMode mode = AssociationMode::BestServer;
    int fixed_site = 0;

    std::vector<PointTarget> points;
    bool has_area = false;
    AreaSpec area;

    std::vector<double> outage_thresholds_db = {-10.0, -8.0, -5.0, 0.0};
    std::vector<double> probe_levels = {1e-2, 1e-3, 1e-4, 1e-5};
    std::string output_dir = "out";

    Deployment build_deployment() const;

    static ScenarioConfig from_json(const nlohmann::json& j);
    static ScenarioConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
};

std::string association_mode_name(AssociationMode mode, int fixed_site);
void parse_association_mode(const std::string& text, AssociationMode& mode, int& fixed_site);

}  // namespace sinrlab
