#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "support/oracles.hpp"
#include "vdo/datasets.hpp"
#include "vdo/errors.hpp"
#include "vdo/hull.hpp"

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

PointCloud disk_cloud(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ang(0, 2 * 3.14159265358979);
    std::uniform_real_distribution<double> rad(0, 1);
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(rad(gen)) * 2.0;
        const double a = ang(gen);
        flat.push_back(r * std::cos(a));
        flat.push_back(r * std::sin(a));
    }
    return PointCloud(2, std::move(flat));
}

}  // namespace

TEST_CASE("interior point is not a hull vertex") {
    const auto hull = convex_hull_2d(
        cloud_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}));
    CHECK(hull.size() == 4);
}

TEST_CASE("three non-collinear points are their own hull") {
    const auto hull = convex_hull_2d(cloud_from({{0, 0}, {2, 0}, {1, 1.5}}));
    CHECK(hull.size() == 3);
}

TEST_CASE("collinear input suggests the box fallback") {
    try {
        convex_hull_2d(cloud_from({{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
        FAIL("expected error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("box") != std::string::npos);
    }
}

TEST_CASE("random disk: every input point inside the hull") {
    const auto cloud = disk_cloud(100, 3);
    const auto hull = convex_hull_2d(cloud);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(oracle::inside_polygon(hull, cloud.coord(i, 0), cloud.coord(i, 1)));
    // extreme-point property: dropping a hull vertex changes the hull
    const auto fs = facets_from_hull(hull);
    for (const auto& v : hull)
        CHECK(std::abs(hull_margin(fs, std::span<const double>(v.data(), 2))) <= 1e-9);
}

TEST_CASE("unit square facets have axis normals and the documented offsets") {
    const auto hull = convex_hull_2d(cloud_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    const auto fs = facets_from_hull(hull);
    REQUIRE(fs.facet_count() == 4);
    // rows are outward unit normals; collect them
    std::vector<std::pair<std::array<double, 2>, double>> rows;
    for (std::size_t i = 0; i < 4; ++i)
        rows.push_back({{fs.A[i * 2], fs.A[i * 2 + 1]}, fs.b[i]});
    auto has = [&](double a0, double a1, double b) {
        for (const auto& [a, bb] : rows)
            if (std::abs(a[0] - a0) < 1e-12 && std::abs(a[1] - a1) < 1e-12 &&
                std::abs(bb - b) < 1e-12)
                return true;
        return false;
    };
    CHECK(has(0, -1, 0));   // bottom
    CHECK(has(1, 0, -1));   // right
    CHECK(has(0, 1, -1));   // top
    CHECK(has(-1, 0, 0));   // left

    // vertices sit on facets, the centroid strictly inside
    for (const auto& v : hull)
        CHECK(hull_margin(fs, std::span<const double>(v.data(), 2)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<double> centroid = {0.5, 0.5};
    CHECK(hull_margin(fs, centroid) == doctest::Approx(-0.5));
}

TEST_CASE("hull margin equals signed facet distance") {
    const auto fs = facets_from_hull(convex_hull_2d(
        cloud_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}})));
    const std::vector<double> outside = {0.5, 1.0 + 0.3};  // 0.3 along the top normal
    CHECK(hull_margin(fs, outside) == doctest::Approx(0.3));
    const std::vector<double> wrong_dim = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(hull_margin(fs, wrong_dim), data_error);
}

TEST_CASE("membership sign agrees with the convexity oracle on random queries") {
    const auto cloud = disk_cloud(60, 11);
    const auto hull = convex_hull_2d(cloud);
    const auto fs = facets_from_hull(hull);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
        const double x = u(gen), y = u(gen);
        const double margin = hull_margin(fs, std::vector<double>{x, y});
        if (std::abs(margin) < 1e-7) continue;  // boundary ties are tolerance-sensitive
        CHECK((margin < 0.0) == oracle::inside_polygon(hull, x, y));
        ++checked;
    }
    CHECK(checked > 900);
}

TEST_CASE("facet irredundancy: dropping any facet admits an exterior point") {
    const auto cloud = disk_cloud(40, 21);
    const auto hull = convex_hull_2d(cloud);
    const auto fs = facets_from_hull(hull);
    REQUIRE(fs.facet_count() == hull.size());
    for (std::size_t drop = 0; drop < fs.facet_count(); ++drop) {
        // edge midpoint pushed slightly outward violates only this facet
        const auto& p = hull[drop];
        const auto& q = hull[(drop + 1) % hull.size()];
        const double eps = 1e-6;
        const std::vector<double> x = {0.5 * (p[0] + q[0]) + eps * fs.A[drop * 2],
                                       0.5 * (p[1] + q[1]) + eps * fs.A[drop * 2 + 1]};
        CHECK(fs.A[drop * 2] * x[0] + fs.A[drop * 2 + 1] * x[1] + fs.b[drop] > 0.0);
        for (std::size_t i = 0; i < fs.facet_count(); ++i) {
            if (i == drop) continue;
            CHECK(fs.A[i * 2] * x[0] + fs.A[i * 2 + 1] * x[1] + fs.b[i] <= 0.0);
        }
    }
}

TEST_CASE("export/import round trip preserves membership") {
    const auto cloud = disk_cloud(80, 31);
    const auto fs = facets_from_cloud(cloud);
    const std::string path = "/tmp/vdo_facets_rt.csv";
    export_facets(path, fs);
    const auto back = import_facets(path, &cloud);
    REQUIRE(back.facet_count() == fs.facet_count());
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const std::vector<double> x = {u(gen), u(gen)};
        CHECK(hull_margin(back, x) == doctest::Approx(hull_margin(fs, x)).epsilon(1e-9));
    }
}

TEST_CASE("zero facet rows are rejected on import") {
    const std::string path = "/tmp/vdo_facets_zero.csv";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("a1,a2,b\n0,0,1\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(import_facets(path), data_error);
}

TEST_CASE("import validation lists violating points") {
    const std::string path = "/tmp/vdo_facets_tight.csv";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        // x <= 0.5 only
        std::fputs("a1,a2,b\n1,0,-0.5\n", f);
        std::fclose(f);
    }
    const auto cloud = cloud_from({{0, 0}, {1, 0}});
    try {
        import_facets(path, &cloud);
        FAIL("expected error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("violating") != std::string::npos);
    }
}

TEST_CASE("3D hull of a cube yields six facet planes") {
    std::vector<double> flat;
    for (double x : {0.0, 1.0})
        for (double y : {0.0, 1.0})
            for (double z : {0.0, 1.0}) {
                flat.push_back(x);
                flat.push_back(y);
                flat.push_back(z);
            }
    flat.insert(flat.end(), {0.5, 0.5, 0.5});  // interior point
    PointCloud cube(3, std::move(flat));
    const auto fs = facets_from_cloud(cube);
    CHECK(fs.facet_count() == 6);
    const std::vector<double> inside = {0.5, 0.5, 0.5};
    CHECK(hull_margin(fs, inside) == doctest::Approx(-0.5));
    const std::vector<double> outside = {1.5, 0.5, 0.5};
    CHECK(hull_margin(fs, outside) == doctest::Approx(0.5));
    CHECK(facet_violations(fs, cube, 1e-9).empty());
}

TEST_CASE("3D hull membership matches plane enumeration on random clouds") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> flat;
    for (int i = 0; i < 40; ++i)
        for (int d = 0; d < 3; ++d) flat.push_back(u(gen));
    PointCloud cloud(3, std::move(flat));
    const auto fs = facets_from_cloud(cloud);
    CHECK(facet_violations(fs, cloud, 1e-9).empty());
    // random exterior points have positive margin
    for (int k = 0; k < 100; ++k) {
        std::vector<double> x = {u(gen) * 3, u(gen) * 3, u(gen) * 3};
        const double m = hull_margin(fs, x);
        if (std::abs(x[0]) > 1.0 || std::abs(x[1]) > 1.0 || std::abs(x[2]) > 1.0)
            CHECK(m > 0.0);
    }
}
