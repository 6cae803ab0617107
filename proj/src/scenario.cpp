#include "mmpos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mmpos {

namespace {
using nlohmann::json;

Vec3 vec3_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(field + ": expected an array of three numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& ctx) {
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw ConfigError(ctx + ": unknown field '" + key + "'");
}
}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    reject_unknown(j, {"sv_aperture", "tv", "mirrors", "los", "sigma_s", "phase_noise_std_rad",
                       "seed", "sfcw", "sw", "imaging"},
                   "scenario");
    if (j.contains("sv_aperture")) {
        const json& a = j["sv_aperture"];
        reject_unknown(a, {"origin", "width_m", "height_m", "nx", "ny"}, "sv_aperture");
        if (a.contains("origin")) cfg.aperture_origin = vec3_from(a["origin"], "sv_aperture.origin");
        if (a.contains("width_m")) cfg.aperture_width = a["width_m"].get<double>();
        if (a.contains("height_m")) cfg.aperture_height = a["height_m"].get<double>();
        if (a.contains("nx")) cfg.aperture_nx = a["nx"].get<std::size_t>();
        if (a.contains("ny")) cfg.aperture_ny = a["ny"].get<std::size_t>();
    }
    if (j.contains("tv")) {
        const json& t = j["tv"];
        reject_unknown(t, {"center", "size_m", "lattice_pitch_m", "rep_a", "rep_b"}, "tv");
        if (t.contains("center")) cfg.tv_center = vec3_from(t["center"], "tv.center");
        if (t.contains("size_m")) cfg.tv_size = vec3_from(t["size_m"], "tv.size_m");
        if (t.contains("lattice_pitch_m")) cfg.lattice_pitch = t["lattice_pitch_m"].get<double>();
        if (t.contains("rep_a")) cfg.rep_a = t["rep_a"].get<long>();
        if (t.contains("rep_b")) cfg.rep_b = t["rep_b"].get<long>();
    }
    if (j.contains("mirrors")) {
        for (const json& m : j["mirrors"]) {
            ScenarioConfig::MirrorConfig mc;
            if (m.contains("vertical_x")) {
                reject_unknown(m, {"vertical_x", "gamma_mag", "gamma_phase"}, "mirror");
                mc.vertical = true;
                mc.vertical_x = m["vertical_x"].get<double>();
            } else {
                reject_unknown(m, {"a", "b", "gamma_mag", "gamma_phase"}, "mirror");
                if (!m.contains("a") || !m.contains("b"))
                    throw ConfigError("mirror: need either {a, b} or {vertical_x}");
                mc.a = m["a"].get<double>();
                mc.b = m["b"].get<double>();
            }
            if (m.contains("gamma_mag")) mc.gamma_mag = m["gamma_mag"].get<double>();
            if (m.contains("gamma_phase")) mc.gamma_phase = m["gamma_phase"].get<double>();
            cfg.mirrors.push_back(mc);
        }
    }
    if (j.contains("los")) cfg.los = j["los"].get<bool>();
    if (j.contains("sigma_s")) cfg.sigma_s = j["sigma_s"].get<double>();
    if (j.contains("phase_noise_std_rad"))
        cfg.phase_noise_std_rad = j["phase_noise_std_rad"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("sfcw")) {
        const json& s = j["sfcw"];
        reject_unknown(s, {"f1_hz", "num_freq", "delta_hz"}, "sfcw");
        if (s.contains("f1_hz")) cfg.f1_hz = s["f1_hz"].get<double>();
        if (s.contains("num_freq")) cfg.num_freq = s["num_freq"].get<std::size_t>();
        if (s.contains("delta_hz")) cfg.delta_hz = s["delta_hz"].get<double>();
    }
    if (j.contains("sw")) {
        const json& s = j["sw"];
        reject_unknown(s, {"f_a_hz", "f_b_hz"}, "sw");
        if (s.contains("f_a_hz")) cfg.sw_fa_hz = s["f_a_hz"].get<double>();
        if (s.contains("f_b_hz")) cfg.sw_fb_hz = s["f_b_hz"].get<double>();
    }
    if (j.contains("imaging")) {
        const json& s = j["imaging"];
        reject_unknown(s, {"nu", "voxel_pitch_m", "grid_pad_m", "max_range_m"}, "imaging");
        if (s.contains("nu")) cfg.nu = s["nu"].get<double>();
        if (s.contains("voxel_pitch_m")) cfg.voxel_pitch = s["voxel_pitch_m"].get<double>();
        if (s.contains("grid_pad_m")) cfg.grid_pad = s["grid_pad_m"].get<double>();
        if (s.contains("max_range_m")) cfg.max_range = s["max_range_m"].get<double>();
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str());
}

void apply_override(ScenarioConfig& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be name=value: " + spec);
    const std::string name = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    const auto num = [&] {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw ConfigError("");
            return v;
        } catch (...) {
            throw ConfigError("override " + name + ": not a number: " + value);
        }
    };
    if (name == "sigma") {
        cfg.sigma_s = num();
    } else if (name == "phase_noise_std") {
        cfg.phase_noise_std_rad = num();
    } else if (name == "snr_db") {
        cfg.phase_noise_std_rad = snr_to_phase_std(num());
    } else if (name == "seed") {
        cfg.seed = static_cast<std::uint64_t>(num());
    } else if (name == "nu") {
        cfg.nu = num();
    } else if (name == "voxel_pitch") {
        cfg.voxel_pitch = num();
    } else if (name == "lattice_pitch") {
        cfg.lattice_pitch = num();
    } else if (name == "tv_distance") {
        cfg.tv_center.z = num();
    } else if (name == "num_mirrors") {
        const auto n = static_cast<std::size_t>(num());
        if (n > cfg.mirrors.size())
            throw ConfigError("override num_mirrors: scenario has only " +
                              std::to_string(cfg.mirrors.size()) + " mirrors");
        cfg.mirrors.resize(n);
    } else if (name == "M") {
        const auto m = static_cast<std::size_t>(num());
        std::size_t nx = 1;
        while (nx * nx < m) nx *= 2;
        if (nx * (m / nx) != m || m % nx != 0)
            throw ConfigError("override M: must factor into a power-of-two grid");
        cfg.aperture_nx = nx;
        cfg.aperture_ny = m / nx;
    } else {
        throw ConfigError("unknown override: " + name);
    }
}

SfcwSpec sfcw_spec(const ScenarioConfig& cfg) {
    SfcwSpec s;
    s.f1 = cfg.f1_hz;
    s.K = cfg.num_freq;
    s.delta = cfg.delta_hz;
    return s;
}

SwSpec sw_spec(const ScenarioConfig& cfg) {
    SwSpec s;
    s.delta = cfg.delta_hz;
    s.f_a = cfg.sw_fa_hz > 0.0 ? cfg.sw_fa_hz : cfg.f1_hz - 4.0 * cfg.delta_hz;
    s.f_b = cfg.sw_fb_hz > 0.0 ? cfg.sw_fb_hz : cfg.f1_hz - 2.0 * cfg.delta_hz;
    return s;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    if (cfg.mirrors.empty() && !cfg.los) throw ConfigError("scenario has no propagation paths");
    if (cfg.phase_noise_std_rad < 0.0) throw ConfigError("phase_noise_std_rad must be >= 0");
    if (cfg.nu < 0.0 || cfg.nu > 1.0) throw ConfigError("imaging.nu must lie in [0, 1]");
    if (cfg.voxel_pitch <= 0.0) throw ConfigError("imaging.voxel_pitch_m must be positive");
    if (cfg.aperture_nx * cfg.aperture_ny < 4)
        throw ConfigError("sv_aperture: need at least 4 antennas");

    Scenario scn;
    scn.sv = planar_aperture(cfg.aperture_origin, cfg.aperture_width, cfg.aperture_height,
                             cfg.aperture_nx, cfg.aperture_ny);
    scn.tv.points = box_surface_lattice(cfg.tv_center, cfg.tv_size, cfg.lattice_pitch);
    scn.has_los = cfg.los;
    for (const auto& mc : cfg.mirrors) {
        if (mc.gamma_mag <= 0.0 || mc.gamma_mag > 1.0)
            throw ConfigError("mirror: gamma_mag must lie in (0, 1]");
        const std::complex<double> g = std::polar(mc.gamma_mag, mc.gamma_phase);
        scn.mirrors.push_back(mc.vertical ? MirrorPlane::vertical_line(mc.vertical_x, g)
                                          : MirrorPlane::line(mc.a, mc.b, g));
    }
    scn.sigma = cfg.sigma_s;
    scn.phase_noise_std = cfg.phase_noise_std_rad;
    scn.seed = cfg.seed;

    // Representative antennas: explicit indices, or the min/max-x corners.
    const auto pick = [&](bool max_side) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < scn.tv.points.size(); ++i) {
            const double v = scn.tv.points[i].x + 1e-6 * scn.tv.points[i].z;
            const double bv = scn.tv.points[best].x + 1e-6 * scn.tv.points[best].z;
            if (max_side ? v > bv : v < bv) best = i;
        }
        return best;
    };
    scn.rep_a_index = cfg.rep_a >= 0 ? static_cast<std::size_t>(cfg.rep_a) : pick(false);
    scn.rep_b_index = cfg.rep_b >= 0 ? static_cast<std::size_t>(cfg.rep_b) : pick(true);
    if (scn.rep_a_index >= scn.tv.points.size() || scn.rep_b_index >= scn.tv.points.size())
        throw ConfigError("tv.rep_a/rep_b out of range");
    if (scn.rep_a_index == scn.rep_b_index)
        throw ConfigError("tv.rep_a and tv.rep_b must differ");

    // The absolute phase-difference unwrap assumes tau - sigma in [0, 1/delta).
    const double window = 1.0 / cfg.delta_hz;
    for (std::size_t ell = 0; ell < scn.num_paths(); ++ell) {
        const MirrorPlane* plane = scn.mirror_for_path(ell);
        for (const Vec3& rx : scn.sv.points) {
            for (const Vec3* tx : {&scn.rep_a(), &scn.rep_b()}) {
                const double gap = path_delay(*tx, rx, plane) - scn.sigma;
                if (gap < 0.0 || gap >= window)
                    throw ConfigError(
                        "clock gap invalid: tau - sigma must lie in [0, 1/delta) on every path "
                        "(got " + std::to_string(gap) + " s)");
            }
        }
    }
    return scn;
}

}  // namespace mmpos
