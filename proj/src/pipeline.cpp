#include "mmpos/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "mmpos/io.hpp"
#include "mmpos/rng.hpp"

namespace mmpos {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Imaging grid around the located representative antennas, padded and kept
// within sane bounds even when the location estimates are badly off.  When a
// clamp had to fire, the spectral reconstruction would face a near-field
// wide-angle box whose cost explodes, so the caller switches to a coarse
// direct correlation instead (`fallback` set).
struct PathGrid {
    GridSpec grid;
    bool fallback = false;
};

PathGrid grid_around(const Vec3& a, const Vec3& b, const ScenarioConfig& cfg, double z0,
                     std::vector<std::string>& warnings, std::size_t path) {
    Vec3 lo{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
    Vec3 hi{std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
    lo = lo - Vec3{cfg.grid_pad, cfg.grid_pad, cfg.grid_pad};
    hi = hi + Vec3{cfg.grid_pad, cfg.grid_pad, cfg.grid_pad};
    const double r = cfg.max_range;
    constexpr double kMaxSpan = 6.0;
    PathGrid out;
    const auto fix_axis = [&](double& l, double& h, double min_l) {
        const double l0 = l, h0 = h;
        l = clamp(l, -r, r);
        h = clamp(h, l, r);
        if (h - l > kMaxSpan) h = l + kMaxSpan;
        l = std::max(l, min_l);
        h = std::max(h, l);
        if (!std::isfinite(l) || !std::isfinite(h)) {
            l = min_l;
            h = min_l + kMaxSpan;
        }
        out.fallback |= (l != l0 || h != h0);
    };
    fix_axis(lo.x, hi.x, -r);
    fix_axis(lo.y, hi.y, -r);
    fix_axis(lo.z, hi.z, z0 + 0.3);
    if (lo.z - z0 < 1.0) out.fallback = true;  // near-field wide-angle box
    if (out.fallback)
        warnings.push_back("path " + std::to_string(path) +
                           ": unreliable location estimate; coarse direct imaging");
    GridSpec& g = out.grid;
    g.origin = lo;
    g.pitch = cfg.voxel_pitch;
    const auto count = [&] {
        g.nx = static_cast<std::size_t>(std::floor((hi.x - lo.x) / g.pitch)) + 1;
        g.ny = static_cast<std::size_t>(std::floor((hi.y - lo.y) / g.pitch)) + 1;
        g.nz = static_cast<std::size_t>(std::floor((hi.z - lo.z) / g.pitch)) + 1;
    };
    count();
    const std::size_t cap = out.fallback ? 32000 : 600000;
    if (g.size() > cap) {
        g.pitch *= std::cbrt(static_cast<double>(g.size()) / static_cast<double>(cap));
        count();
        if (!out.fallback)
            warnings.push_back("path " + std::to_string(path) +
                               ": voxel pitch coarsened to bound the image size");
    }
    return out;
}
}  // namespace

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["sigma_true_s"] = sigma_true;
    j["sigma_hat_s"] = sigma_hat;
    j["rep_a_error_m"] = rep_a_error;
    j["rep_b_error_m"] = rep_b_error;
    j["angle_search_objective_m"] = objective;
    j["hausdorff_m"] = hausdorff;
    j["directed_hausdorff_m"] = directed_hausdorff;
    j["timing_s"] = {{"simulate", t_simulate}, {"sync", t_sync}, {"image", t_image}, {"map", t_map}};
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    const Scenario scn = build_scenario(cfg);
    const SfcwSpec sfcw = sfcw_spec(cfg);
    const SwSpec sw = sw_spec(cfg);
    sw.validate(sfcw);

    RunArtifacts art;
    RunReport& rep = art.report;
    rep.sigma_true = scn.sigma;
    art.ground_truth = scn.tv.points;

    // Aperture sampling rules; the stepped-band rule uses the farthest
    // representative path as the scene depth.
    {
        const double dx = cfg.aperture_nx > 1
                              ? cfg.aperture_width / static_cast<double>(cfg.aperture_nx - 1)
                              : 0.0;
        const double dy = cfg.aperture_ny > 1
                              ? cfg.aperture_height / static_cast<double>(cfg.aperture_ny - 1)
                              : 0.0;
        double r_max = 1.0;
        for (std::size_t ell = 0; ell < scn.num_paths(); ++ell) {
            const MirrorPlane* plane = scn.mirror_for_path(ell);
            for (const Vec3* tx : {&scn.rep_a(), &scn.rep_b()})
                r_max = std::max(r_max, path_delay(*tx, scn.sv.points[0], plane) * kSpeedOfLight);
        }
        const SamplingReport sr = check_sampling(dx, dy, sfcw.f_center(), sfcw.delta, r_max);
        rep.warnings.insert(rep.warnings.end(), sr.warnings.begin(), sr.warnings.end());
    }

    // Forward simulation with an unsynchronized demodulation reference.
    auto t0 = Clock::now();
    DemodulatedSignal sig = simulate_sfcw(scn, sfcw, 0.0);
    simulate_sw(scn, sw, sig);
    add_phase_noise(sig, scn.phase_noise_std, scn.seed);
    rep.t_simulate = seconds_since(t0);

    // Synchronization from the two-tone signature waveforms.
    t0 = Clock::now();
    art.sync = synchronize(sig, scn.sv, sfcw.delta);
    rep.sigma_hat = art.sync.sigma_hat;
    for (std::size_t ell = 0; ell < scn.num_paths(); ++ell) {
        const MirrorPlane* plane = scn.mirror_for_path(ell);
        const Vec3 va = plane ? reflect_point(scn.rep_a(), *plane) : scn.rep_a();
        const Vec3 vb = plane ? reflect_point(scn.rep_b(), *plane) : scn.rep_b();
        rep.rep_a_error.push_back(distance(art.sync.positions_a[ell], va));
        rep.rep_b_error.push_back(distance(art.sync.positions_b[ell], vb));
    }
    // Keep downstream stages well-defined even when a locate diverged.
    for (std::size_t ell = 0; ell < scn.num_paths(); ++ell) {
        Vec3& pa = art.sync.positions_a[ell];
        Vec3& pb = art.sync.positions_b[ell];
        const auto finite = [](const Vec3& p) {
            return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
        };
        bool fixed = false;
        if (!finite(pa)) {
            pa = scn.sv.points[0] + Vec3{0.0, 0.0, 0.5 * cfg.max_range};
            fixed = true;
        }
        if (!finite(pb)) {
            pb = pa + Vec3{1.0, 0.0, 0.0};
            fixed = true;
        }
        if (std::hypot(pb.x - pa.x, pb.z - pa.z) < 1e-9) {
            pb.x += 0.5;
            fixed = true;
        }
        if (fixed)
            rep.warnings.push_back("path " + std::to_string(ell) +
                                   ": representative location replaced by a placeholder");
    }
    rep.t_sync = seconds_since(t0);

    // Per-path virtual images on grids around the located antennas.
    t0 = Clock::now();
    resync_phasors(sig, sfcw, art.sync.sigma_hat);
    std::vector<VirtualPosition> vps;
    const double z0 = scn.sv.points[0].z;
    for (std::size_t ell = 0; ell < scn.num_paths(); ++ell) {
        const MirrorPlane* plane = scn.mirror_for_path(ell);
        const std::complex<double> gamma = plane ? plane->gamma : std::complex<double>{1.0, 0.0};
        VirtualPosition vp;
        vp.path = ell;
        vp.rep_a = art.sync.positions_a[ell];
        vp.rep_b = art.sync.positions_b[ell];
        vp.phi = observed_angle_phi(vp.rep_a, vp.rep_b);
        const PathGrid pg = grid_around(vp.rep_a, vp.rep_b, cfg, z0, rep.warnings, ell);
        const PathSignal ps = extract_path(sig, ell);
        VoxelImage img = pg.fallback
                             ? backprojection_oracle(ps, scn.sv, sfcw, pg.grid)
                             : reconstruct_image(ps, scn.sv, sfcw, gamma, pg.grid);
        threshold_image(img, cfg.nu);
        vp.occupancy = img.occupied_points();
        art.vp_occupancy.push_back(vp.occupancy);
        vps.push_back(std::move(vp));
    }
    rep.t_image = seconds_since(t0);

    // Mirror-angle recovery and virtual-to-real mapping.
    t0 = Clock::now();
    if (vps.size() >= 3) {
        try {
            art.mapping = search_theta1(vps);
            rep.objective = art.mapping.objective;
            for (std::size_t ell = 0; ell < vps.size(); ++ell) {
                const Vec3& va = vps[ell].rep_a;
                const double disp = std::hypot(va.x - art.mapping.rep_a_star.x,
                                               va.z - art.mapping.rep_a_star.z);
                if (disp < 1e-9) {
                    art.mapping.mapped.push_back(vps[ell].occupancy);  // line-of-sight fixed point
                } else {
                    const XZLine line = reflection_line(art.mapping.theta[ell], va,
                                                        art.mapping.rep_a_star);
                    art.mapping.mapped.push_back(map_vp_to_rp(vps[ell].occupancy, line));
                }
            }
        } catch (const std::exception& e) {
            // Degenerate estimates: score the unmapped virtual occupancies.
            art.mapping = MappedPosition{};
            art.mapping.rep_a_star = vps[0].rep_a;
            art.mapping.rep_b_star = vps[0].rep_b;
            for (const auto& vp : vps) art.mapping.mapped.push_back(vp.occupancy);
            rep.objective = std::numeric_limits<double>::infinity();
            rep.warnings.push_back(std::string("mirror recovery failed (") + e.what() +
                                   "); virtual occupancies scored unmapped");
        }
    } else if (vps.size() == 1 && scn.has_los) {
        // Pure line-of-sight: the virtual image already sits at the target.
        art.mapping.rep_a_star = vps[0].rep_a;
        art.mapping.rep_b_star = vps[0].rep_b;
        art.mapping.mapped.push_back(vps[0].occupancy);
    } else {
        throw std::runtime_error("unresolvable geometry: need three paths or a single line of sight");
    }
    art.mapping.occupancy = fuse_mapped(art.mapping.mapped, cfg.voxel_pitch);
    art.mapped = art.mapping.occupancy;
    rep.t_map = seconds_since(t0);

    if (art.mapped.empty()) throw std::runtime_error("empty reconstruction");
    rep.hausdorff = hausdorff(art.mapped, art.ground_truth);
    rep.directed_hausdorff = directed_hausdorff(art.mapped, art.ground_truth);
    return art;
}

void write_artifacts(const std::string& out_dir, const RunArtifacts& art, bool dump_signals,
                     const ScenarioConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto p = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };
    std::ofstream(p("report.json")) << art.report.to_json();
    write_point_cloud(p("ground_truth.xyz"), art.ground_truth);
    write_point_cloud(p("mapped.xyz"), art.mapped);
    for (std::size_t ell = 0; ell < art.vp_occupancy.size(); ++ell)
        write_point_cloud(p("vp_path" + std::to_string(ell) + ".xyz"), art.vp_occupancy[ell]);
    if (dump_signals) {
        const Scenario scn = build_scenario(cfg);
        DemodulatedSignal sig = simulate_sfcw(scn, sfcw_spec(cfg), 0.0);
        simulate_sw(scn, sw_spec(cfg), sig);
        add_phase_noise(sig, scn.phase_noise_std, scn.seed);
        write_signal_dump(p("signal.bin"), sig);
    }
}

SweepResult run_sweep(const ScenarioConfig& base, const std::string& parameter,
                      const std::vector<double>& values, std::size_t seeds) {
    SweepResult out;
    if (parameter == "M") {
        // Location-estimate covariance study: per-equation range noise at a
        // small phase level keeps the estimator in its linear regime.
        const double sigma_z = base.phase_noise_std_rad > 0.0 ? base.phase_noise_std_rad : 0.05;
        const double scale = kSpeedOfLight / (2.0 * std::numbers::pi * base.delta_hz) * sigma_z;
        for (double value : values) {
            ScenarioConfig cfg = base;
            apply_override(cfg, "M=" + std::to_string(static_cast<long>(value)));
            const Scenario scn = build_scenario(cfg);
            const MirrorPlane* plane = scn.mirror_for_path(0);
            const Vec3 target = plane ? reflect_point(scn.rep_a(), *plane) : scn.rep_a();

            std::vector<double> rhs_true(scn.sv.points.size() - 1);
            const double d1 = distance(scn.sv.points[0], target);
            for (std::size_t m = 1; m < scn.sv.points.size(); ++m)
                rhs_true[m - 1] = distance(scn.sv.points[m], target) - d1;

            const std::size_t runs = std::max<std::size_t>(seeds, 1) * 1000;
            Vec3 mean;
            std::vector<Vec3> est;
            est.reserve(runs);
            for (std::size_t r = 0; r < runs; ++r) {
                std::vector<double> rhs = rhs_true;
                for (std::size_t i = 0; i < rhs.size(); ++i)
                    rhs[i] += scale * rng::normal(base.seed + 17 * r + 1, i);
                // a draw can push the solve into degenerate territory at very
                // small apertures; such samples are dropped, not fabricated
                try {
                    const LocateResult loc = gauss_newton_locate(rhs, scn.sv, target);
                    est.push_back(loc.position);
                    mean += loc.position;
                } catch (const std::exception&) {
                }
            }
            if (est.size() < 2) throw std::runtime_error("covariance study: solver diverged");
            mean = mean / static_cast<double>(est.size());
            double trace = 0.0;
            for (const Vec3& e : est) {
                const Vec3 d = e - mean;
                trace += d.dot(d);
            }
            trace /= static_cast<double>(est.size() - 1);
            const auto cov = sync_covariance(target, scn.sv, sigma_z, base.delta_hz);
            out.empirical_trace.push_back(trace);
            out.analytic_trace.push_back(cov[0][0] + cov[1][1] + cov[2][2]);
        }
        out.stats = sweep_stats(out.rows);
        out.csv = sweep_csv(out.stats);
        return out;
    }
    if (parameter != "tv_distance" && parameter != "num_mirrors")
        throw ConfigError("unknown sweep parameter: " + parameter);
    for (double value : values) {
        for (std::size_t s = 0; s < seeds; ++s) {
            ScenarioConfig cfg = base;
            apply_override(cfg, parameter + "=" + std::to_string(value));
            cfg.seed = base.seed + s;
            const RunArtifacts art = run_scenario(cfg);
            out.rows.push_back({value, art.report.hausdorff, art.report.directed_hausdorff});
        }
    }
    out.stats = sweep_stats(out.rows);
    out.csv = sweep_csv(out.stats);
    return out;
}

std::string resolve_report(const ScenarioConfig& cfg) {
    const SfcwSpec spec = sfcw_spec(cfg);
    const double aperture = std::max(cfg.aperture_width, cfg.aperture_height);
    const double range = distance(cfg.tv_center,
                                  cfg.aperture_origin + Vec3{cfg.aperture_width / 2,
                                                             cfg.aperture_height / 2, 0.0});
    const double dx = cfg.aperture_nx > 1
                          ? cfg.aperture_width / static_cast<double>(cfg.aperture_nx - 1)
                          : 0.0;
    const double dy = cfg.aperture_ny > 1
                          ? cfg.aperture_height / static_cast<double>(cfg.aperture_ny - 1)
                          : 0.0;
    const SamplingReport sr = check_sampling(dx, dy, spec.f_center(), spec.delta, range);
    nlohmann::json j;
    j["azimuth_resolution_m"] = azimuth_resolution(spec.f_center(), aperture, range);
    j["range_resolution_m"] = range_resolution(spec.f1, spec.f_last());
    j["aperture_spacing_m"] = sr.spacing_actual;
    j["aperture_spacing_limit_m"] = sr.spacing_limit;
    j["aperture_spacing_ok"] = sr.spacing_ok;
    j["frequency_gap_hz"] = sr.delta_actual;
    j["frequency_gap_limit_hz"] = sr.delta_limit;
    j["frequency_gap_ok"] = sr.delta_ok;
    j["warnings"] = sr.warnings;
    return j.dump(2) + "\n";
}

}  // namespace mmpos
