#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "mmpos/io.hpp"
#include "mmpos/pipeline.hpp"
#include "mmpos/scenario.hpp"

using namespace mmpos;

namespace {

std::string scenario_path(const char* name) {
    return std::string(MMPOS_SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("configuration validation rejects inconsistent inputs") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.json"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_json("{ not json"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"tv": {"centre": [0,0,5]}})"), ConfigError);

    ScenarioConfig cfg = load_scenario(scenario_path("noiseless_los.json"));
    CHECK_NOTHROW(build_scenario(cfg));

    // a clock gap larger than any path delay breaks the unwrap window
    ScenarioConfig bad = cfg;
    bad.sigma_s = 1.0e-7;  // ~30 m of clock offset against a ~2 m scene
    CHECK_THROWS_AS(build_scenario(bad), ConfigError);

    bad = cfg;
    bad.mirrors.clear();
    bad.los = false;
    CHECK_THROWS_AS(build_scenario(bad), ConfigError);

    bad = cfg;
    bad.nu = 1.5;
    CHECK_THROWS_AS(build_scenario(bad), ConfigError);

    // signature tones must stay below the probe band
    bad = cfg;
    bad.sw_fa_hz = bad.f1_hz;
    CHECK_THROWS_AS(sw_spec(bad).validate(sfcw_spec(bad)), std::invalid_argument);
}

TEST_CASE("overrides update the parsed configuration") {
    ScenarioConfig cfg = load_scenario(scenario_path("fast.json"));
    apply_override(cfg, "nu=0.35");
    CHECK(cfg.nu == doctest::Approx(0.35));
    apply_override(cfg, "seed=42");
    CHECK(cfg.seed == 42);
    apply_override(cfg, "tv_distance=7.5");
    CHECK(cfg.tv_center.z == doctest::Approx(7.5));
    apply_override(cfg, "num_mirrors=2");
    CHECK(cfg.mirrors.size() == 2);
    CHECK_THROWS_AS(apply_override(cfg, "num_mirrors=5"), ConfigError);
    apply_override(cfg, "M=1024");
    CHECK(cfg.aperture_nx * cfg.aperture_ny == 1024);
    CHECK_THROWS_AS(apply_override(cfg, "M=18"), ConfigError);  // 18 has no 2^k factor split
    CHECK_THROWS_AS(apply_override(cfg, "bogus=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "nu"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "nu=abc"), ConfigError);
}

TEST_CASE("identical configuration and seed reproduce the run bit-for-bit") {
    const ScenarioConfig cfg = load_scenario(scenario_path("fast.json"));
    const RunArtifacts a = run_scenario(cfg);
    const RunArtifacts b = run_scenario(cfg);
    CHECK(a.report.hausdorff == b.report.hausdorff);
    CHECK(a.report.directed_hausdorff == b.report.directed_hausdorff);
    CHECK(a.report.sigma_hat == b.report.sigma_hat);
    CHECK(a.report.objective == b.report.objective);
    REQUIRE(a.mapped.size() == b.mapped.size());
    for (std::size_t i = 0; i < a.mapped.size(); ++i) {
        CHECK(a.mapped[i].x == b.mapped[i].x);
        CHECK(a.mapped[i].y == b.mapped[i].y);
        CHECK(a.mapped[i].z == b.mapped[i].z);
    }
    CHECK(a.report.rep_a_error == b.report.rep_a_error);
    CHECK(a.report.rep_b_error == b.report.rep_b_error);

    // and the full pipeline stays accurate on this clean scene
    CHECK(a.report.directed_hausdorff < 0.35);
    for (double e : a.report.rep_a_error) CHECK(e < 1e-6);
}

TEST_CASE("sweeps reject unknown parameters") {
    const ScenarioConfig cfg = load_scenario(scenario_path("fast.json"));
    CHECK_THROWS_AS(run_sweep(cfg, "wavelength", {1.0, 2.0}, 1), ConfigError);
}

TEST_CASE("resolution report carries the sampling diagnosis") {
    const ScenarioConfig cfg = load_scenario(scenario_path("fast.json"));
    const std::string json = resolve_report(cfg);
    CHECK(json.find("azimuth_resolution_m") != std::string::npos);
    CHECK(json.find("range_resolution_m") != std::string::npos);
    CHECK(json.find("spacing_limit_m") != std::string::npos);
}

TEST_CASE("signal dumps round-trip through the binary format") {
    DemodulatedSignal sig;
    sig.num_paths = 2;
    sig.num_rx = 3;
    sig.num_freq = 4;
    sig.sigma_tilde_used = 1.5e-9;
    for (std::size_t i = 0; i < 24; ++i)
        sig.sfcw.push_back({0.1 * static_cast<double>(i), -0.05 * static_cast<double>(i)});
    const std::string path = "roundtrip_signal.bin";
    write_signal_dump(path, sig);
    const DemodulatedSignal back = read_signal_dump(path);
    std::remove(path.c_str());
    REQUIRE(back.num_paths == 2);
    REQUIRE(back.num_rx == 3);
    REQUIRE(back.num_freq == 4);
    REQUIRE(back.sfcw.size() == sig.sfcw.size());
    // entries are stored as complex64, so expect float32 rounding
    for (std::size_t i = 0; i < sig.sfcw.size(); ++i)
        CHECK(std::abs(back.sfcw[i] - sig.sfcw[i]) < 1e-6 * (1.0 + std::abs(sig.sfcw[i])));
}
