#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mmpos/geometry.hpp"
#include "mmpos/rng.hpp"

using namespace mmpos;

namespace {

MirrorPlane random_plane(std::uint64_t seed, std::uint64_t i) {
    if (rng::uniform(seed, 1000000 + i) < 0.2)
        return MirrorPlane::vertical_line(4.0 * rng::normal(seed, 2000000 + i));
    return MirrorPlane::line(3.0 * rng::normal(seed, 3000000 + i),
                             4.0 * rng::normal(seed, 4000000 + i));
}

Vec3 random_point(std::uint64_t seed, std::uint64_t i) {
    return {5.0 * rng::normal(seed, 3 * i), 5.0 * rng::normal(seed, 3 * i + 1),
            5.0 * rng::normal(seed, 3 * i + 2)};
}

}  // namespace

TEST_CASE("reflection is an involution and an isometry") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const MirrorPlane m = random_plane(17, i);
        const Vec3 p = random_point(18, i);
        const Vec3 q = random_point(19, i);
        const Vec3 rp = reflect_point(p, m);
        const Vec3 rq = reflect_point(q, m);
        CHECK(distance(reflect_point(rp, m), p) < 1e-9);
        CHECK(distance(rp, rq) == doctest::Approx(distance(p, q)).epsilon(1e-12));
        CHECK(rp.y == p.y);  // the plane is vertical, y never moves
    }
}

TEST_CASE("reflection fixes points on the mirror line") {
    const MirrorPlane m = MirrorPlane::line(0.75, -2.0);
    for (double x : {-3.0, 0.0, 1.5, 8.0}) {
        const Vec3 p{x, 1.3, 0.75 * x - 2.0};
        CHECK(distance(reflect_point(p, m), p) < 1e-12);
    }
    const MirrorPlane v = MirrorPlane::vertical_line(2.5);
    CHECK(distance(reflect_point({2.5, -1.0, 7.0}, v), {2.5, -1.0, 7.0}) < 1e-15);
}

TEST_CASE("vertical mirror flips x only") {
    const MirrorPlane v = MirrorPlane::vertical_line(1.0);
    const Vec3 r = reflect_point({3.0, 0.5, 4.0}, v);
    CHECK(r.x == doctest::Approx(-1.0));
    CHECK(r.y == doctest::Approx(0.5));
    CHECK(r.z == doctest::Approx(4.0));
}

TEST_CASE("specular path equals straight path from the mirrored source") {
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const MirrorPlane m = random_plane(31, i);
        const Vec3 tx = random_point(32, i);
        const Vec3 rx = random_point(33, i);
        const double direct = distance(reflect_point(tx, m), rx) / kSpeedOfLight;
        CHECK(path_delay(tx, rx, &m) == doctest::Approx(direct).epsilon(1e-12));
    }
    // and without a plane it is just the line-of-sight delay
    const Vec3 a{0, 0, 0}, b{3, 0, 4};
    CHECK(path_delay(a, b, nullptr) == doctest::Approx(5.0 / kSpeedOfLight));
}

TEST_CASE("virtual_positions reflects every element") {
    AntennaArray tv;
    for (std::uint64_t i = 0; i < 50; ++i) tv.points.push_back(random_point(41, i));
    const MirrorPlane m = MirrorPlane::line(-1.2, 6.0);
    const AntennaArray v = virtual_positions(tv, m);
    REQUIRE(v.points.size() == tv.points.size());
    for (std::size_t i = 0; i < tv.points.size(); ++i)
        CHECK(distance(v.points[i], reflect_point(tv.points[i], m)) < 1e-12);
}

TEST_CASE("observed angle in the XZ plane") {
    CHECK(observed_angle_phi({0, 0, 0}, {1, 0, 0}) == doctest::Approx(0.0));
    CHECK(observed_angle_phi({0, 0, 0}, {0, 5, 1}) == doctest::Approx(std::numbers::pi / 2));
    CHECK(observed_angle_phi({1, 0, 1}, {0, 0, 0}) ==
          doctest::Approx(-3.0 * std::numbers::pi / 4));
    CHECK_THROWS_AS(observed_angle_phi({1, 0, 2}, {1, 9, 2}), std::invalid_argument);
}

TEST_CASE("box surface lattice counts and hollowness") {
    // 3 x 1 x 0.6 box at pitch 0.223 -> 14 x 5 x 4 grid minus the interior
    const auto pts = box_surface_lattice({0, 0, 0}, {3.0, 1.0, 0.6}, 0.223);
    CHECK(pts.size() == 208);
    for (const Vec3& p : pts) {
        const bool on_x = std::abs(std::abs(p.x) - 1.5) < 1e-9;
        const bool on_y = std::abs(std::abs(p.y) - 0.5) < 1e-9;
        const bool on_z = std::abs(std::abs(p.z) - 0.3) < 1e-9;
        CHECK((on_x || on_y || on_z));
    }

    // a degenerate pitch still yields the 8 box corners at minimum
    const auto corners = box_surface_lattice({1, 2, 3}, {1, 1, 1}, 10.0);
    CHECK(corners.size() == 8);
}

TEST_CASE("planar aperture layout") {
    const AntennaArray a = planar_aperture({-0.5, 0.0, 0.25}, 1.0, 2.0, 5, 3);
    REQUIRE(a.points.size() == 15);
    CHECK(distance(a.points.front(), {-0.5, 0.0, 0.25}) < 1e-12);
    CHECK(distance(a.points[3], {-0.25, 0.0, 0.25}) < 1e-12);  // x varies in the outer loop
    CHECK(distance(a.points[4], {-0.25, 1.0, 0.25}) < 1e-12);
    CHECK(distance(a.points.back(), {0.5, 2.0, 0.25}) < 1e-12);
    for (const Vec3& p : a.points) CHECK(p.z == doctest::Approx(0.25));
    CHECK_THROWS_AS(planar_aperture({0, 0, 0}, 1, 1, 0, 4), std::invalid_argument);
}
