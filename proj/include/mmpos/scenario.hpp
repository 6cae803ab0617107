#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmpos/geometry.hpp"
#include "mmpos/signal.hpp"

namespace mmpos {

// Raised for malformed or inconsistent configuration files; carries a
// field-level message suitable for exit-code-2 CLI reporting.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Declarative scenario description mirroring the JSON schema in the repo.
struct ScenarioConfig {
    // sv_aperture
    Vec3 aperture_origin{-0.5, 0.0, 0.0};
    double aperture_width = 1.0;
    double aperture_height = 1.0;
    std::size_t aperture_nx = 16;
    std::size_t aperture_ny = 16;
    // tv
    Vec3 tv_center{0.0, 0.5, 10.0};
    Vec3 tv_size{3.0, 1.0, 0.6};
    double lattice_pitch = 0.223;
    long rep_a = -1;  // -1: auto-select the min-x lattice corner
    long rep_b = -1;  // -1: auto-select the max-x lattice corner
    // mirrors
    struct MirrorConfig {
        bool vertical = false;
        double a = 0.0, b = 0.0;
        double vertical_x = 0.0;
        double gamma_mag = 1.0;
        double gamma_phase = 0.0;
    };
    std::vector<MirrorConfig> mirrors;
    bool los = false;
    // timing / noise
    double sigma_s = 0.0;
    double phase_noise_std_rad = 0.0;
    std::uint64_t seed = 0;
    // waveform
    double f1_hz = 57.0e9;
    std::size_t num_freq = 512;
    double delta_hz = 5.86e6;
    double sw_fa_hz = 0.0;  // 0: default to f1 - 4*delta
    double sw_fb_hz = 0.0;  // 0: default to f1 - 2*delta
    // imaging
    double nu = 0.5;
    double voxel_pitch = 0.05;
    double grid_pad = 1.0;
    double max_range = 100.0;  // sanity bound for estimated positions
};

// Parses a scenario JSON file.  Unknown keys are rejected.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);

// Applies a "name=value" override (CLI --override).
void apply_override(ScenarioConfig& cfg, const std::string& spec);

// Materializes the scene and validates cross-field invariants, including
// the clock-gap window tau - sigma in [0, 1/delta) on every path.
Scenario build_scenario(const ScenarioConfig& cfg);

SfcwSpec sfcw_spec(const ScenarioConfig& cfg);
SwSpec sw_spec(const ScenarioConfig& cfg);

}  // namespace mmpos
