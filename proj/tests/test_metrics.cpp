#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "mmpos/metrics.hpp"
#include "mmpos/rng.hpp"

using namespace mmpos;

namespace {

std::vector<Vec3> random_cloud(std::uint64_t seed, std::size_t n, double scale) {
    std::vector<Vec3> pts;
    for (std::uint64_t i = 0; i < n; ++i)
        pts.push_back({scale * rng::normal(seed, 3 * i), scale * rng::normal(seed, 3 * i + 1),
                       scale * rng::normal(seed, 3 * i + 2)});
    return pts;
}

}  // namespace

TEST_CASE("directed distance on hand-checked sets") {
    const std::vector<Vec3> a{{0, 0, 0}, {1, 0, 0}};
    const std::vector<Vec3> b{{3, 4, 0}};
    CHECK(directed_hausdorff(a, b) == doctest::Approx(5.0));       // farthest is the origin
    CHECK(directed_hausdorff(b, a) == doctest::Approx(std::sqrt(4.0 + 16.0)));
    CHECK(hausdorff(a, b) == doctest::Approx(5.0));
    CHECK(hausdorff(a, a) == doctest::Approx(0.0));
    CHECK_THROWS_AS(directed_hausdorff({}, b), std::invalid_argument);
    CHECK_THROWS_AS(hausdorff(a, {}), std::invalid_argument);
}

TEST_CASE("pruned evaluation matches the brute-force reference") {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const auto a = random_cloud(100 + s, 40 + (s % 80), 1.0 + 0.2 * static_cast<double>(s));
        const auto b = random_cloud(300 + s, 25 + (s % 60), 2.0);
        CHECK(directed_hausdorff(a, b) == directed_hausdorff_brute(a, b));
        CHECK(directed_hausdorff(b, a) == directed_hausdorff_brute(b, a));
    }
    // clustered sets exercise the hash pruning differently than gaussians
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto a = random_cloud(500 + s, 50, 0.01);
        auto b = random_cloud(600 + s, 50, 0.01);
        for (auto& p : b) p.x += 5.0;
        CHECK(directed_hausdorff(a, b) == directed_hausdorff_brute(a, b));
    }
}

TEST_CASE("sweep statistics aggregate per parameter") {
    const std::vector<SweepRow> rows{
        {1.0, 2.0, 1.0}, {1.0, 4.0, 3.0}, {2.0, 10.0, 10.0}};
    const auto stats = sweep_stats(rows);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].parameter == 1.0);
    CHECK(stats[0].mean_hausdorff == doctest::Approx(3.0));
    CHECK(stats[0].std_hausdorff == doctest::Approx(std::sqrt(2.0)));  // sample std
    CHECK(stats[0].mean_directed == doctest::Approx(2.0));
    CHECK(stats[1].mean_hausdorff == doctest::Approx(10.0));
    CHECK(stats[1].std_hausdorff == doctest::Approx(0.0));

    const std::string csv = sweep_csv(stats);
    CHECK(csv.rfind("param,mean_hausdorff,std_hausdorff,mean_directed,std_directed\n", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
    CHECK(csv.find("\n2,") != std::string::npos);
}
