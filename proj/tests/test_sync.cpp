#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "mmpos/rng.hpp"
#include "mmpos/scenario.hpp"
#include "mmpos/sync.hpp"

using namespace mmpos;

namespace {

constexpr double kDelta = 5.86e6;

// Range differences against the reference antenna, in the same layout the
// phase front end produces: entry m-1 belongs to antenna m.
std::vector<double> exact_rhs(const Vec3& x, const AntennaArray& rx) {
    std::vector<double> rhs(rx.points.size() - 1);
    for (std::size_t m = 1; m < rx.points.size(); ++m)
        rhs[m - 1] = distance(rx.points[m], x) - distance(rx.points[0], x);
    return rhs;
}

AntennaArray square_aperture(std::size_t n, double side) {
    return planar_aperture({-side / 2, 0.0, 0.0}, side, side, n, n);
}

}  // namespace

TEST_CASE("two-tone phase difference wraps into (-pi, pi]") {
    // tau - sigma = 100 ns at a 5.86 MHz gap: the raw difference 3.68194 rad
    // comes back wrapped to -2.60124 rad.
    DemodulatedSignal sig;
    sig.num_paths = 1;
    sig.num_rx = 1;
    sig.num_freq = 1;
    sig.sfcw.assign(1, {1.0, 0.0});
    const double gap = 100.0e-9;
    const double raw = 2.0 * std::numbers::pi * kDelta * gap;
    sig.sw_alpha = {std::polar(1.0, 0.0), std::polar(1.0, -raw)};
    sig.sw_beta = {std::polar(1.0, 0.3), std::polar(1.0, 0.3 - raw)};
    const PdoaMeasurement eta = extract_eta(sig, kDelta);
    CHECK(raw == doctest::Approx(3.6819466).epsilon(1e-6));
    CHECK(eta.a(0, 0) == doctest::Approx(raw - 2.0 * std::numbers::pi).epsilon(1e-9));
    CHECK(eta.b(0, 0) == doctest::Approx(raw - 2.0 * std::numbers::pi).epsilon(1e-9));
    CHECK(eta.a(0, 0) == doctest::Approx(-2.6012387).epsilon(1e-6));
}

TEST_CASE("range-difference scale is c/(2*pi*delta)") {
    const std::vector<double> row{0.0, 1.0, -0.5, 0.25};
    const auto rhs = tdoa_rhs(row, kDelta);
    REQUIRE(rhs.size() == 3);  // the reference antenna drops out
    CHECK(rhs[0] == doctest::Approx(8.1478640).epsilon(1e-6));  // one radian in meters
    CHECK(rhs[1] == doctest::Approx(-4.0739320).epsilon(1e-6));
    CHECK(rhs[2] == doctest::Approx(0.25 * 8.1478640).epsilon(1e-6));
    // pairwise differences rewrap before scaling
    const auto wrapped = tdoa_rhs({3.0, -3.0, 0.0, 0.0}, kDelta);
    CHECK(wrapped[0] ==
          doctest::Approx((2.0 * std::numbers::pi - 6.0) * 8.1478640).epsilon(1e-6));
}

TEST_CASE("gauss-newton recovers the emitter from exact range differences") {
    const AntennaArray rx = square_aperture(6, 1.0);
    for (std::uint64_t i = 0; i < 300; ++i) {
        const Vec3 x{3.0 * (rng::uniform(5, 2 * i) - 0.5), 3.0 * (rng::uniform(5, 2 * i + 1) - 0.5),
                     4.0 + 2.0 * rng::uniform(6, i)};
        const auto rhs = exact_rhs(x, rx);
        const LocateResult res = gauss_newton_locate(rhs, rx, x + Vec3{0.2, -0.1, 0.3});
        CHECK(res.converged);
        CHECK(distance(res.position, x) < 1e-6);
    }
}

TEST_CASE("initial guess alone lands close enough for the polish step") {
    const AntennaArray rx = square_aperture(8, 1.0);
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Vec3 x{4.0 * (rng::uniform(7, 2 * i) - 0.5), 4.0 * (rng::uniform(7, 2 * i + 1) - 0.5),
                     4.0 + 11.0 * rng::uniform(8, i)};
        const auto rhs = exact_rhs(x, rx);
        const Vec3 seed = initial_guess(rhs, rx);
        const LocateResult res = gauss_newton_locate(rhs, rx, seed);
        CHECK(res.converged);
        CHECK(distance(res.position, x) < 1e-6);
    }
}

TEST_CASE("degenerate receive geometry is rejected") {
    AntennaArray line;
    for (int i = 0; i < 6; ++i) line.points.push_back({0.1 * i, 0.0, 0.0});
    const Vec3 x{0.3, 0.0, 5.0};
    CHECK_THROWS_WITH_AS(gauss_newton_locate(exact_rhs(x, line), line, x),
                         "degenerate aperture geometry", std::runtime_error);
    AntennaArray three;
    three.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    CHECK_THROWS_AS(gauss_newton_locate({0.1, 0.2}, three, x), std::invalid_argument);
}

TEST_CASE("clock gap estimate from absolute phase differences") {
    const AntennaArray rx = square_aperture(4, 0.8);
    const Vec3 x{0.5, 0.2, 6.0};
    const double sigma = 12.5e-9;
    std::vector<double> eta(rx.points.size());
    for (std::size_t m = 0; m < eta.size(); ++m) {
        const double tau = distance(rx.points[m], x) / kSpeedOfLight;
        eta[m] = std::remainder(2.0 * std::numbers::pi * kDelta * (tau - sigma),
                                2.0 * std::numbers::pi);
    }
    CHECK(std::abs(estimate_sigma(x, eta, rx, kDelta) - sigma) < 1e-15);
}

TEST_CASE("location covariance scales with the noise power") {
    const AntennaArray rx = square_aperture(8, 1.0);
    const Vec3 x{0.4, 0.3, 8.0};
    const auto c1 = sync_covariance(x, rx, 0.01, kDelta);
    const auto c2 = sync_covariance(x, rx, 0.02, kDelta);
    for (int i = 0; i < 3; ++i) {
        CHECK(c1[i][i] > 0.0);
        for (int j = 0; j < 3; ++j) {
            CHECK(c1[i][j] == doctest::Approx(c1[j][i]).epsilon(1e-9));
            CHECK(c2[i][j] == doctest::Approx(4.0 * c1[i][j]).epsilon(1e-9));
        }
    }
}

TEST_CASE("full synchronization is exact on a clean scenario") {
    const ScenarioConfig cfg =
        load_scenario(std::string(MMPOS_SCENARIO_DIR) + "/noiseless_los.json");
    const Scenario scn = build_scenario(cfg);
    const SfcwSpec sfcw = sfcw_spec(cfg);
    DemodulatedSignal sig = simulate_sfcw(scn, sfcw, 0.0);
    simulate_sw(scn, sw_spec(cfg), sig);
    const SyncEstimate est = synchronize(sig, scn.sv, sfcw.delta);
    CHECK(std::abs(est.sigma_hat - scn.sigma) < 1e-12);
    REQUIRE(est.positions_a.size() == 1);
    CHECK(distance(est.positions_a[0], scn.rep_a()) < 1e-6);
    CHECK(distance(est.positions_b[0], scn.rep_b()) < 1e-6);
    CHECK(est.detail_a[0].converged);
    CHECK(est.detail_b[0].converged);
}
