#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "vdo/datasets.hpp"
#include "vdo/errors.hpp"
#include "vdo/ocsvm.hpp"

using namespace vdo;

namespace {

PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed, double span = 2.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-span, span);
    std::vector<double> flat(n * dim);
    for (auto& v : flat) v = u(gen);
    return PointCloud(dim, std::move(flat));
}

std::vector<std::vector<double>> kernel_matrix(const PointCloud& c, double gamma) {
    std::vector<std::vector<double>> K(c.size(), std::vector<double>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j)
            K[i][j] = std::exp(-gamma * squared_distance(c.point(i), c.point(j)));
    return K;
}

// support-vector rows in the training cloud, matched by coordinates
std::vector<std::size_t> sv_rows(const OneClassSvmModel& m, const PointCloud& cloud) {
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < m.sv_count(); ++k) {
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (squared_distance(m.support_vectors.point(k), cloud.point(i)) == 0.0) {
                rows.push_back(i);
                break;
            }
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("two identical points share the weight and sit on the boundary") {
    PointCloud cloud(2, {0.3, 0.4, 0.3, 0.4});
    const auto m = train(cloud, 0.9, KernelSpec{1.0});
    REQUIRE(m.sv_count() == 2);
    CHECK(m.alphas[0] == doctest::Approx(0.5));
    CHECK(m.alphas[1] == doctest::Approx(0.5));
    CHECK(decision(m, cloud.point(0)) >= -1e-9);
}

TEST_CASE("nu*N <= 1 is rejected") {
    PointCloud cloud(1, {0.0, 1.0, 2.0});
    CHECK_THROWS_AS(train(cloud, 0.2, KernelSpec{1.0}), config_error);
    CHECK_THROWS_AS(train(cloud, 1.5, KernelSpec{1.0}), config_error);
}

TEST_CASE("dual feasibility after training, always") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto cloud = random_cloud(40, 2, seed);
        const double nu = 0.1 + 0.15 * static_cast<double>(seed % 3);
        const auto m = train(cloud, nu, KernelSpec{0.7});
        const double C = 1.0 / (nu * static_cast<double>(cloud.size()));
        double sum = 0.0;
        for (double a : m.alphas) {
            CHECK(a >= 0.0);
            CHECK(a <= C + 1e-12);
            sum += a;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
}

TEST_CASE("dual objective matches the projected-gradient oracle") {
    std::mt19937_64 gen(2024);
    for (int rep = 0; rep < 12; ++rep) {
        const std::size_t n = 8 + static_cast<std::size_t>(
                                      std::uniform_int_distribution<int>(0, 22)(gen));
        const auto cloud = random_cloud(n, 2, 1000 + static_cast<std::uint64_t>(rep));
        const double nu = std::uniform_real_distribution<double>(0.25, 0.8)(gen);
        if (nu * static_cast<double>(n) <= 1.05) continue;
        const double gamma = std::uniform_real_distribution<double>(0.2, 1.5)(gen);

        TrainStats stats;
        train(cloud, nu, KernelSpec{gamma}, 1e-8, 4000, &stats);
        const double oracle_obj =
            oracle::pgd_dual_objective(kernel_matrix(cloud, gamma), nu, 60000);
        CHECK(stats.dual_objective <= oracle_obj + 1e-6);
        CHECK(stats.dual_objective >= oracle_obj - 1e-6);
    }
}

TEST_CASE("independent KKT residual stays within tolerance") {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        const auto cloud = random_cloud(60, 2, seed);
        const double nu = 0.2;
        const auto m = train(cloud, nu, KernelSpec{0.5}, 1e-6);
        const auto rows = sv_rows(m, cloud);
        REQUIRE(rows.size() == m.sv_count());
        const auto rep = oracle::kkt_residual(cloud, m.alphas, rows, m.rho, 0.5, nu, 1e-6);
        CHECK(rep.residual <= 1e-6 + 1e-9);
        CHECK(rep.sum_alpha_error <= 1e-10);
        CHECK(rep.box_violation <= 1e-12);
    }
}

TEST_CASE("decision far away tends to -rho; margin vectors sit near zero") {
    DatasetSpec spec;
    spec.shape = Shape::Oval;
    spec.n_points = 150;
    spec.seed = 2;
    const auto cloud = generate_dataset(spec);
    const auto m = train(cloud, 0.05, KernelSpec{0.4});

    const std::vector<double> far = {1e4, 1e4};
    CHECK(decision(m, far) == doctest::Approx(-m.rho).epsilon(1e-12));

    const double C = 1.0 / (0.05 * static_cast<double>(cloud.size()));
    for (std::size_t k = 0; k < m.sv_count(); ++k)
        if (m.alphas[k] > 1e-6 && m.alphas[k] < C - 1e-6)
            CHECK(std::abs(decision(m, m.support_vectors.point(k))) <= 1e-5);
}

TEST_CASE("single support vector formula value") {
    OneClassSvmModel m;
    m.support_vectors = PointCloud(1, {0.0});
    m.alphas = {1.0};
    m.rho = 0.1;
    m.kernel.gamma = 0.25;
    m.nu = 0.5;
    m.n_train = 2;
    const std::vector<double> x = {2.0};  // squared distance 4
    CHECK(decision(m, x) == doctest::Approx(std::exp(-1.0) - 0.1));
}

TEST_CASE("decision bound: -rho <= f <= 1 - rho") {
    const auto cloud = random_cloud(80, 2, 3);
    const auto m = train(cloud, 0.1, KernelSpec{0.6});
    std::mt19937_64 gen(12);
    for (int k = 0; k < 300; ++k) {
        const auto x = oracle::random_point(gen, 2, -5, 5);
        const double f = decision(m, x);
        CHECK(f >= -m.rho - 1e-10);
        CHECK(f <= 1.0 - m.rho + 1e-10);
    }
}

TEST_CASE("training is translation equivariant") {
    const auto cloud = random_cloud(30, 2, 9);
    std::vector<double> shifted(cloud.data());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        shifted[i * 2] += 3.7;
        shifted[i * 2 + 1] -= 1.2;
    }
    PointCloud cloud2(2, std::move(shifted));
    // the optimum is translation invariant; solve both tightly enough to see it
    const auto m1 = train(cloud, 0.2, KernelSpec{1.0}, 1e-12, 20000);
    const auto m2 = train(cloud2, 0.2, KernelSpec{1.0}, 1e-12, 20000);
    std::mt19937_64 gen(77);
    for (int k = 0; k < 100; ++k) {
        const auto x = oracle::random_point(gen, 2, -3, 3);
        const std::vector<double> xs = {x[0] + 3.7, x[1] - 1.2};
        CHECK(std::abs(decision(m1, x) - decision(m2, xs)) <= 1e-9);
    }
}

TEST_CASE("kernel decreases with gamma") {
    std::mt19937_64 gen(31);
    for (int k = 0; k < 200; ++k) {
        const auto x = oracle::random_point(gen, 3, -2, 2);
        const auto y = oracle::random_point(gen, 3, -2, 2);
        if (squared_distance(std::span<const double>(x), std::span<const double>(y)) == 0.0)
            continue;
        CHECK(rbf_kernel(x, y, 0.5) > rbf_kernel(x, y, 0.9));
    }
}

TEST_CASE("nu-property holds on a generated dataset") {
    DatasetSpec spec;
    spec.shape = Shape::Banana;
    spec.n_points = 400;
    spec.seed = 4;
    const auto cloud = generate_dataset(spec);
    const auto m = train(cloud, 0.05, KernelSpec{0.3});
    const auto rep = validate_nu_property(m, cloud);
    CHECK(rep.pass);
    CHECK(rep.outlier_fraction <= 0.05 + 2.0 / 400.0);
    CHECK(rep.sv_fraction >= 0.05 - 2.0 / 400.0);

    // deliberately corrupted offset fails
    OneClassSvmModel bad = m;
    bad.rho += 1.0;
    CHECK_FALSE(validate_nu_property(bad, cloud).pass);
}

TEST_CASE("single-element schedule is returned as-is") {
    const auto cloud = random_cloud(30, 2, 15);
    const auto sel = select_gamma(cloud, 0.2, {0.5});
    CHECK(sel.gamma == 0.5);
    CHECK(sel.plateau_found);
    REQUIRE(sel.history.size() == 1);
}

TEST_CASE("gamma selection plateaus at case-study scale and #SV trends down") {
    // The generated clouds have clean boundaries, so the SV-count curve keeps
    // easing toward the nu floor and the plateau rule settles over a wide
    // band; assert the order of magnitude and the trend.
    for (Shape shape : {Shape::Box, Shape::Banana, Shape::CircleWithHole}) {
        DatasetSpec spec;
        spec.shape = shape;
        spec.n_points = 600;
        spec.seed = 7;
        const auto cloud = generate_dataset(spec);
        const auto sel = select_gamma(cloud, 0.03, default_gamma_schedule());
        CHECK(sel.gamma >= 0.08);
        CHECK(sel.gamma <= 1.6);
        CHECK(sel.plateau_found);

        // documented diagnostic: the SV count trend is nonincreasing overall
        REQUIRE(sel.history.size() >= 2);
        CHECK(sel.history.front().second >= sel.history.back().second);
    }
}

TEST_CASE("model JSON round trip preserves the decision function") {
    DatasetSpec spec;
    spec.shape = Shape::TwoOvals;
    spec.n_points = 150;
    spec.seed = 8;
    const auto cloud = generate_dataset(spec);
    auto m = train(cloud, 0.05, KernelSpec{0.35});
    m.scaler = Scaler::identity(2);
    const std::string path = "/tmp/vdo_svm_rt.json";
    save_model(path, m);
    const auto back = load_model(path);
    CHECK(back.nu == m.nu);
    CHECK(back.kernel.gamma == m.kernel.gamma);
    std::mt19937_64 gen(6);
    for (int k = 0; k < 200; ++k) {
        const auto x = oracle::random_point(gen, 2, -4, 6);
        CHECK(decision(back, x) == decision(m, x));
    }
}
