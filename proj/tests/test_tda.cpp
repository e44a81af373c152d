#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "support/oracles.hpp"
#include "vdo/datasets.hpp"
#include "vdo/errors.hpp"
#include "vdo/tda.hpp"

using namespace vdo;

namespace {

PointCloud cloud_from(std::initializer_list<std::array<double, 2>> pts) {
    std::vector<double> flat;
    for (const auto& p : pts) {
        flat.push_back(p[0]);
        flat.push_back(p[1]);
    }
    return PointCloud(2, std::move(flat));
}

}  // namespace

TEST_CASE("two points: one edge at their distance") {
    const auto cloud = cloud_from({{0, 0}, {1, 0}});
    const auto f = build_rips(cloud, 2.0);
    REQUIRE(f.edges().size() == 1);
    CHECK(f.edges()[0].eps == doctest::Approx(1.0));
    const auto d = compute_persistence(f);
    REQUIRE(d.pairs_of_dim(0).size() == 2);
    std::vector<double> deaths;
    for (const auto& p : d.pairs_of_dim(0)) deaths.push_back(p.death);
    std::sort(deaths.begin(), deaths.end());
    CHECK(deaths[0] == doctest::Approx(1.0));
    CHECK(deaths[1] == kInfDeath);
}

TEST_CASE("equilateral triangle fills at the side length") {
    const double s = 1.5;
    const auto cloud = cloud_from({{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}});
    const auto f = build_rips(cloud, 3.0);
    const auto tris = f.triangles();
    REQUIRE(tris.size() == 1);
    CHECK(tris[0].eps == doctest::Approx(s));
}

TEST_CASE("unit square: one H1 class born at 1, dead at sqrt(2)") {
    const auto cloud = cloud_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto d = compute_persistence(build_rips(cloud, 2.0));
    const auto h1 = d.pairs_of_dim(1);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].birth == doctest::Approx(1.0));
    CHECK(h1[0].death == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("a 10-point ring carries one component and one hole at mid scale") {
    std::vector<double> flat;
    for (int k = 0; k < 10; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / 10.0;
        flat.push_back(std::cos(a));
        flat.push_back(std::sin(a));
    }
    PointCloud ring(2, std::move(flat));
    const auto d = compute_persistence(build_rips(ring, 3.0));
    // adjacent gap ~0.618; the cycle fills around sqrt(3)
    CHECK(d.betti(0, 1.0) == 1);
    CHECK(d.betti(1, 1.0) == 1);
    CHECK(d.betti(1, 2.0) == 0);
}

TEST_CASE("every point contributes exactly one H0 pair") {
    std::mt19937_64 gen(42);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> flat;
        const std::size_t n = 3 + rep * 4;
        for (std::size_t i = 0; i < 2 * n; ++i)
            flat.push_back(std::uniform_real_distribution<double>(-1, 1)(gen));
        PointCloud cloud(2, std::move(flat));
        const auto d = compute_persistence(build_rips(cloud, enclosing_box_diagonal(cloud)));
        CHECK(d.pairs_of_dim(0).size() == n);
        CHECK(d.n_points == n);
    }
}

TEST_CASE("duplicate point adds one zero-death H0 pair") {
    const auto base = cloud_from({{0, 0}, {1, 0}, {0.4, 0.9}});
    const auto dup = cloud_from({{0, 0}, {1, 0}, {0.4, 0.9}, {0.4, 0.9}});
    const auto d0 = compute_persistence(build_rips(base, 4.0));
    const auto d1 = compute_persistence(build_rips(dup, 4.0));
    CHECK(d1.pairs_of_dim(0).size() == d0.pairs_of_dim(0).size() + 1);
    int zero_deaths = 0;
    for (const auto& p : d1.pairs_of_dim(0))
        if (p.death == 0.0) ++zero_deaths;
    CHECK(zero_deaths == 1);
}

TEST_CASE("Betti curves match brute-force ranks on random small clouds") {
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(
                                      std::uniform_int_distribution<int>(0, 5)(gen));
        std::vector<double> flat;
        for (std::size_t i = 0; i < 2 * n; ++i)
            flat.push_back(std::uniform_real_distribution<double>(0, 1)(gen));
        PointCloud cloud(2, std::move(flat));

        const auto f = build_rips(cloud, enclosing_box_diagonal(cloud) + 0.1);
        const auto d = compute_persistence(f);
        for (const auto& e : f.edges()) {
            const auto [b0, b1] = oracle::brute_betti(cloud, e.eps);
            CHECK(d.betti(0, e.eps) == static_cast<std::size_t>(b0));
            CHECK(d.betti(1, e.eps) == static_cast<std::size_t>(b1));
        }
    }
}

TEST_CASE("H0 deaths are the Euclidean MST edge lengths") {
    std::mt19937_64 gen(99);
    for (int rep = 0; rep < 8; ++rep) {
        const std::size_t n = 20 + static_cast<std::size_t>(rep) * 10;
        std::vector<double> flat;
        for (std::size_t i = 0; i < 2 * n; ++i)
            flat.push_back(std::uniform_real_distribution<double>(-3, 3)(gen));
        PointCloud cloud(2, std::move(flat));
        const auto d = compute_persistence(build_rips(cloud, enclosing_box_diagonal(cloud)));
        std::vector<double> deaths;
        for (const auto& p : d.pairs_of_dim(0))
            if (p.death != kInfDeath) deaths.push_back(p.death);
        std::sort(deaths.begin(), deaths.end());
        const auto mst = oracle::mst_edge_lengths(cloud);
        REQUIRE(deaths.size() == mst.size());
        for (std::size_t i = 0; i < deaths.size(); ++i)
            CHECK(deaths[i] == doctest::Approx(mst[i]).epsilon(1e-9));
    }
}

TEST_CASE("diagram is rigid-motion invariant") {
    DatasetSpec spec;
    spec.shape = Shape::CircleWithHole;
    spec.n_points = 60;
    spec.seed = 3;
    const auto cloud = generate_dataset(spec);

    const double c = std::cos(0.7), s = std::sin(0.7);
    std::vector<double> flat;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double x = cloud.coord(i, 0), y = cloud.coord(i, 1);
        flat.push_back(c * x - s * y + 10.0);
        flat.push_back(s * x + c * y - 4.0);
    }
    PointCloud moved(2, std::move(flat));

    auto pairs_of = [](const PointCloud& pc) {
        auto d = compute_persistence(build_rips(pc, enclosing_box_diagonal(pc)));
        std::vector<std::array<double, 3>> v;
        for (const auto& p : d.pairs)
            v.push_back({static_cast<double>(p.dim), p.birth,
                         p.death == kInfDeath ? -1.0 : p.death});
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a = pairs_of(cloud);
    const auto b = pairs_of(moved);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i][0] == b[i][0]);
        CHECK(std::abs(a[i][1] - b[i][1]) <= 1e-9);
        CHECK(std::abs(a[i][2] - b[i][2]) <= 1e-9);
    }
}

TEST_CASE("edge cap guard advises subsampling") {
    DatasetSpec spec;
    spec.shape = Shape::Box;
    spec.n_points = 100;
    const auto cloud = generate_dataset(spec);
    try {
        build_rips(cloud, 100.0, 50);
        FAIL("expected error");
    } catch (const numeric_error& e) {
        CHECK(std::string(e.what()).find("subsample") != std::string::npos);
    }
}

TEST_CASE("maxmin subsample: m = N permutes, m = 1 single, clusters covered") {
    DatasetSpec spec;
    spec.shape = Shape::TwoCircles;
    spec.n_points = 200;
    spec.seed = 5;
    const auto cloud = generate_dataset(spec);

    const auto all = maxmin_subsample(cloud, cloud.size(), 1);
    CHECK(all.cloud.size() == cloud.size());
    std::set<std::size_t> idx(all.indices.begin(), all.indices.end());
    CHECK(idx.size() == cloud.size());
    CHECK(all.hausdorff == doctest::Approx(0.0));

    const auto one = maxmin_subsample(cloud, 1, 1);
    CHECK(one.cloud.size() == 1);

    // farthest-point with m=2 picks one point per cluster
    const auto two = maxmin_subsample(cloud, 2, 17);
    const auto centers = cluster_centers(spec);
    auto side = [&](std::size_t i) {
        const double d0 = std::hypot(two.cloud.coord(i, 0) - centers[0][0],
                                     two.cloud.coord(i, 1) - centers[0][1]);
        const double d1 = std::hypot(two.cloud.coord(i, 0) - centers[1][0],
                                     two.cloud.coord(i, 1) - centers[1][1]);
        return d0 < d1 ? 0 : 1;
    };
    CHECK(side(0) != side(1));

    CHECK_THROWS_AS(maxmin_subsample(cloud, 0, 1), config_error);
    CHECK_THROWS_AS(maxmin_subsample(cloud, cloud.size() + 1, 1), config_error);
}

TEST_CASE("summary: clean convex cloud recommends the hull") {
    PersistenceDiagram d;
    d.n_points = 5;
    for (int i = 0; i < 4; ++i) d.pairs.push_back({0, 0.0, 0.1});
    d.pairs.push_back({0, 0.0, kInfDeath});
    const auto s = summarize(d);
    CHECK(s.n_long_clusters == 1);
    CHECK(s.n_long_holes == 0);
    CHECK(s.recommendation == ValidityModelKind::ConvexHull);
}

TEST_CASE("summary: a separated cluster and a long hole trigger the SVM") {
    PersistenceDiagram d;
    d.n_points = 8;
    for (int i = 0; i < 6; ++i) d.pairs.push_back({0, 0.0, 0.1});
    d.pairs.push_back({0, 0.0, 2.0});  // bridge between clusters
    d.pairs.push_back({0, 0.0, kInfDeath});
    const auto s = summarize(d);
    CHECK(s.n_long_clusters == 2);
    CHECK(s.recommendation == ValidityModelKind::OneClassSvm);

    PersistenceDiagram h;
    h.n_points = 4;
    for (int i = 0; i < 3; ++i) h.pairs.push_back({0, 0.0, 0.1});
    h.pairs.push_back({0, 0.0, kInfDeath});
    h.pairs.push_back({1, 0.3, 2.5});  // long-lived hole
    h.pairs.push_back({1, 0.3, 0.35});
    h.pairs.push_back({1, 0.2, 0.24});
    h.pairs.push_back({1, 0.25, 0.28});
    const auto sh = summarize(h);
    CHECK(sh.n_long_holes == 1);
    CHECK(sh.recommendation == ValidityModelKind::OneClassSvm);
    REQUIRE(sh.hole_scales.size() == 1);
    CHECK(sh.hole_scales[0][1] == doctest::Approx(2.5));
}
