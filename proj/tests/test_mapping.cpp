#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmpos/geometry.hpp"
#include "mmpos/mapping.hpp"
#include "mmpos/rng.hpp"

using namespace mmpos;

namespace {

XZLine random_line(std::uint64_t seed, std::uint64_t i) {
    XZLine line;
    line.point = {3.0 * rng::normal(seed, 4 * i), 0.0, 3.0 * rng::normal(seed, 4 * i + 1)};
    if (rng::uniform(seed, 4 * i + 2) < 0.15) {
        line.vertical = true;
    } else {
        line.slope = std::tan(std::numbers::pi * (rng::uniform(seed, 4 * i + 3) - 0.5) * 0.98);
    }
    return line;
}

Vec3 random_point(std::uint64_t seed, std::uint64_t i) {
    return {4.0 * rng::normal(seed, 3 * i), 4.0 * rng::normal(seed, 3 * i + 1),
            4.0 * rng::normal(seed, 3 * i + 2)};
}

}  // namespace

TEST_CASE("line reflection is an involution and an isometry") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const XZLine line = random_line(51, i);
        const Vec3 p = random_point(52, i);
        const Vec3 q = random_point(53, i);
        const Vec3 rp = reflect_across_line(p, line);
        CHECK(distance(reflect_across_line(rp, line), p) < 1e-8);
        CHECK(distance(rp, reflect_across_line(q, line)) ==
              doctest::Approx(distance(p, q)).epsilon(1e-9));
        CHECK(rp.y == p.y);
        // midpoint sits on the line
        const Vec3 mid = (p + rp) / 2.0;
        if (line.vertical) {
            CHECK(mid.x == doctest::Approx(line.point.x).epsilon(1e-9));
        } else {
            const double z_on = line.point.z + line.slope * (mid.x - line.point.x);
            CHECK(std::abs(mid.z - z_on) < 1e-6 * (1.0 + std::abs(line.slope)));
        }
    }
}

TEST_CASE("angle chain halves the observed rotation") {
    const std::vector<double> phis{0.4, 1.0, -0.6, 3.0};
    const auto theta = theta_chain(0.25, phis);
    REQUIRE(theta.size() == 4);
    CHECK(theta[0] == doctest::Approx(0.25));
    CHECK(theta[1] == doctest::Approx(0.25 + (1.0 - 0.4) / 2.0));
    CHECK(theta[2] == doctest::Approx(0.25 + (-0.6 - 0.4) / 2.0));
    CHECK(theta[3] == doctest::Approx(0.25 + (3.0 - 0.4) / 2.0));
    // results stay wrapped
    const auto big = theta_chain(3.0, {0.0, 6.0});
    CHECK(big[1] <= std::numbers::pi);
    CHECK(big[1] > -std::numbers::pi);
    CHECK_THROWS_AS(theta_chain(0.0, {0.1}), std::invalid_argument);
}

TEST_CASE("triangulation inverts the two-line construction") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double t1 = std::numbers::pi * (rng::uniform(61, 2 * i) - 0.5) * 0.96;
        double t2 = std::numbers::pi * (rng::uniform(61, 2 * i + 1) - 0.5) * 0.96;
        if (std::abs(std::tan(t1) - std::tan(t2)) < 0.05) continue;
        const Vec3 p = random_point(62, i);
        const double d1 = 1.0 + 4.0 * rng::uniform(63, 2 * i);
        const double d2 = 1.0 + 4.0 * rng::uniform(63, 2 * i + 1);
        const Vec3 a1 = p - Vec3{std::cos(t1), 0.0, std::sin(t1)} * d1;
        const Vec3 a2 = p - Vec3{std::cos(t2), 0.0, std::sin(t2)} * d2;
        const Vec3 got = triangulate_point({a1.x, p.y, a1.z}, {a2.x, p.y, a2.z}, t1, t2);
        CHECK(distance(got, p) < 1e-6 * (1.0 + distance(a1, p) + distance(a2, p)));
    }
    CHECK_THROWS_AS(triangulate_point({0, 0, 0}, {1, 0, 0}, 0.3, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(triangulate_point({0, 0, 0}, {1, 2, 0}, 0.5, 0.3), std::invalid_argument);
}

TEST_CASE("mirror line recovery from a virtual/real pair") {
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const XZLine line = random_line(71, i);
        const Vec3 real = random_point(72, i);
        const Vec3 virt = reflect_across_line(real, line);
        if (distance(virt, real) < 1e-3) continue;  // point effectively on the mirror
        // the recovered line must reflect virtual back onto real
        const double t_star = std::atan2(real.z - virt.z, real.x - virt.x);
        const XZLine rec = reflection_line(t_star, virt, real);
        CHECK(distance(reflect_across_line(virt, rec), real) < 1e-6);
    }
    CHECK_THROWS_AS(reflection_line(0.1, {1, 0, 2}, {1, 0, 2}), std::invalid_argument);
}

TEST_CASE("mapping a virtual occupancy set restores the real cluster") {
    const XZLine line = random_line(81, 7);
    std::vector<Vec3> real;
    for (std::uint64_t i = 0; i < 200; ++i) real.push_back(random_point(82, i));
    std::vector<Vec3> virt;
    for (const Vec3& p : real) virt.push_back(reflect_across_line(p, line));
    const auto mapped = map_vp_to_rp(virt, line);
    REQUIRE(mapped.size() == real.size());
    for (std::size_t i = 0; i < real.size(); ++i) CHECK(distance(mapped[i], real[i]) < 1e-8);
}

TEST_CASE("mirror angle search recovers a synthetic three-path scene") {
    // three mirror lines with distinct orientations
    const std::vector<XZLine> lines = {
        {0.15, false, {0.0, 0.0, 6.0}}, {-0.4, false, {2.0, 0.0, 7.0}},
        {0.9, false, {-3.0, 0.0, 8.0}}};
    const Vec3 rep_a{-0.4, 0.2, 2.0}, rep_b{0.5, 0.2, 2.3};
    std::vector<Vec3> cluster;
    for (std::uint64_t i = 0; i < 40; ++i)
        cluster.push_back(Vec3{-0.4, 0.0, 2.0} + random_point(91, i) * 0.1);

    std::vector<VirtualPosition> vps;
    for (std::size_t l = 0; l < lines.size(); ++l) {
        VirtualPosition vp;
        vp.path = l;
        vp.rep_a = reflect_across_line(rep_a, lines[l]);
        vp.rep_b = reflect_across_line(rep_b, lines[l]);
        vp.phi = observed_angle_phi(vp.rep_a, vp.rep_b);
        for (const Vec3& p : cluster) vp.occupancy.push_back(reflect_across_line(p, lines[l]));
        vps.push_back(vp);
    }

    const MappedPosition mp = search_theta1(vps);
    const double theta1_true = std::atan(-1.0 / lines[0].slope);
    CHECK(std::abs(std::remainder(mp.theta1_star - theta1_true, std::numbers::pi)) < 1e-5);
    CHECK(mp.objective < 1e-6);
    CHECK(distance(mp.rep_a_star, rep_a) < 1e-4);
    CHECK(distance(mp.rep_b_star, rep_b) < 1e-4);

    // with the recovered angles every path maps back onto the real cluster
    for (std::size_t l = 0; l < lines.size(); ++l) {
        const XZLine rec = reflection_line(mp.theta[l], vps[l].rep_a, mp.rep_a_star);
        const auto mapped = map_vp_to_rp(vps[l].occupancy, rec);
        for (std::size_t i = 0; i < cluster.size(); ++i)
            CHECK(distance(mapped[i], cluster[i]) < 1e-3);
    }

    CHECK_THROWS_AS(search_theta1({vps[0], vps[1]}), std::invalid_argument);
}

TEST_CASE("fused occupancies deduplicate on the voxel grid") {
    const std::vector<std::vector<Vec3>> mapped = {
        {{0.01, 0.0, 0.02}, {0.90, 0.0, 0.0}}, {{0.04, 0.0, 0.04}, {0.90, 0.0, 0.74}}};
    const auto fused = fuse_mapped(mapped, 0.1);
    CHECK(fused.size() == 3);  // the two near-origin points share a cell
    CHECK_THROWS_AS(fuse_mapped({}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(fuse_mapped(mapped, 0.0), std::invalid_argument);
}
