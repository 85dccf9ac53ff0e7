#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moire/potential.hpp"

namespace moire {

struct LandscapeConfig {
    int n = 64;
    EigenMode mode = EigenMode::exact;
};

struct BandsConfig {
    std::vector<std::string> path{"G", "K", "M", "G"};
    int n_per_segment = 30;
    int nbands = 6;
};

struct ChernConfig {
    int nbands = 2;
    std::array<int, 2> grid{18, 18};
};

struct AgmonConfig {
    std::optional<double> E;  ///< defaults to lambda_minus(0)
    int resolution = 128;
    int stencil_radius = 5;
    bool dump_rho = false;
};

struct ScanConfig {
    std::vector<double> h_list{0.12, 0.10, 0.08, 0.07, 0.06, 0.05};
    int nbands = 1;
    std::array<int, 2> grid{6, 6};
    int agmon_resolution = 128;
};

struct HarmonicConfig {
    std::string mode = "numeric";
    int nlevels = 6;
    bool compare_bloch = false;
};

struct WellsConfig {
    int grid_n = 96;
    EigenMode mode = EigenMode::exact;
};

struct WellConfig {
    double L = 1.5;
    int n = 0;  ///< 0 picks a size from h
    int nev = 1;
    double delta1 = 0.3;
    double delta2 = 0.45;
};

struct FourierConfig {
    int samples = 16;
    int points = 100;
    std::uint64_t seed = 12345;
};

/// Everything a run needs. Model parameters live at the top level; each command reads its
/// own section.
struct RunConfig {
    ModelParams params;
    std::optional<double> gcut;  ///< empty means converge automatically
    LandscapeConfig landscape;
    BandsConfig bands;
    ChernConfig chern;
    AgmonConfig agmon;
    ScanConfig scan;
    HarmonicConfig harmonic;
    WellsConfig wells;
    WellConfig well;
    FourierConfig fourier;
};

/// Parses a JSON document. Unknown keys, wrong types and a missing "h" raise ValidationError
/// naming the key.
RunConfig parse_config(const std::string& text);
RunConfig config_from_json(const nlohmann::json& j);

/// Canonical form: every key present, fixed order.
nlohmann::ordered_json config_to_json(const RunConfig& c);
std::string serialize_config(const RunConfig& c);

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

}  // namespace moire
