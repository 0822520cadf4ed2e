// test_measures.cpp — fugacity series against closed forms, round trips,
// sampling laws, rate-function oracle values, curvature gap.

#include <cmath>
#include <vector>

#include "doctest.h"

#include "zrp/environment.hpp"
#include "zrp/measures.hpp"
#include "zrp/rng.hpp"

using namespace zrp;
using measures::FugacityTable;

TEST_SUITE("measures") {

TEST_CASE("partition function: geometric and exponential closed forms") {
    auto c1 = measures::const1_rate();
    auto lin = measures::linear_rate();
    CHECK(measures::partition_function(c1, 0.5) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(measures::partition_function(lin, 1.3) ==
          doctest::Approx(std::exp(1.3)).epsilon(1e-13));
    CHECK(measures::partition_function(c1, 0.0) == 1.0);
    CHECK(measures::partition_function(lin, 0.0) == 1.0);
    CHECK_THROWS_AS(measures::partition_function(c1, 1.0), NumericalError);
    CHECK_THROWS_AS(measures::partition_function(c1, 1.5), NumericalError);
}

TEST_CASE("mean density: geometric and Poisson closed forms") {
    auto c1 = measures::const1_rate();
    auto lin = measures::linear_rate();
    CHECK(measures::mean_density(c1, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(measures::mean_density(lin, 2.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(measures::mean_density(c1, 0.0) == 0.0);
    // strictly increasing on a grid
    double prev = -1.0;
    for (int i = 0; i <= 40; ++i) {
        double phi = 0.95 * static_cast<double>(i) / 40.0;
        double r = measures::mean_density(c1, phi);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("flux anchors and round trip on both families") {
    const auto& c1 = FugacityTable::shared("const1");
    const auto& lin = FugacityTable::shared("linear");
    CHECK(std::abs(c1.flux(1.0) - 0.5) < 1e-10);
    CHECK(std::abs(lin.flux(0.7) - 0.7) < 1e-10);
    CHECK(c1.flux(0.0) == 0.0);
    for (const FugacityTable* t : {&c1, &lin}) {
        for (int i = 0; i < 200; ++i) {
            double rho = 0.05 + (t->rho_max() - 0.05) * static_cast<double>(i) / 199.0;
            double phi = t->flux(rho);
            CHECK(std::abs(t->r(phi) - rho) <= 1e-10);
        }
    }
}

TEST_CASE("flux derivative anchors and finite-difference consistency") {
    const auto& c1 = FugacityTable::shared("const1");
    const auto& lin = FugacityTable::shared("linear");
    CHECK(c1.flux_derivative(1.0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(lin.flux_derivative(0.3) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lin.flux_derivative(7.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double rho : {0.2, 0.7, 1.5, 3.0, 10.0}) {
        double h = 1e-5 * std::max(1.0, rho);
        double fd = (c1.flux(rho + h) - c1.flux(rho - h)) / (2.0 * h);
        CHECK(c1.flux_derivative(rho) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("interpolated tables stay within 1e-9 of the direct series") {
    for (const char* name : {"const1", "linear"}) {
        const auto& t = FugacityTable::shared(name);
        Rng rng(3);
        for (int i = 0; i < 300; ++i) {
            double rho = 0.01 + (t.rho_max() - 0.01) * rng.uniform01();
            CHECK(std::abs(t.flux_interp(rho) - t.flux(rho)) <= 1e-9);
            double phi = t.phi_max() * rng.uniform01();
            CHECK(std::abs(t.z_interp(phi) - t.z(phi)) <= 1e-9 * std::max(1.0, t.z(phi)));
            CHECK(std::abs(t.r_interp(phi) - t.r(phi)) <= 1e-9 * std::max(1.0, t.r(phi)));
        }
    }
}

TEST_CASE("flux range errors") {
    const auto& t = FugacityTable::shared("const1");
    CHECK_THROWS_AS(t.flux(-0.1), ValidationError);
    CHECK_THROWS_AS(t.flux(t.rho_max() + 1.0), ValidationError);
}

TEST_CASE("marginal sampling: geometric law at rho = 1") {
    const auto& t = FugacityTable::shared("const1");
    Rng rng(2024);
    const int draws = 1000000;
    double sum = 0.0;
    std::vector<std::int64_t> hist(8, 0);
    for (int i = 0; i < draws; ++i) {
        std::int64_t k = measures::sample_marginal(t, 1.0, rng);
        sum += static_cast<double>(k);
        if (k < 8) ++hist[static_cast<std::size_t>(k)];
    }
    double mean = sum / draws;
    CHECK(std::abs(mean - 1.0) < 0.004);  // ~2.8 standard errors of sqrt(2)/1000
    for (int k = 0; k < 8; ++k) {
        double expected = std::pow(2.0, -(k + 1));
        double freq = static_cast<double>(hist[static_cast<std::size_t>(k)]) / draws;
        double se = std::sqrt(expected * (1.0 - expected) / draws);
        CHECK(std::abs(freq - expected) < 5.0 * se);
    }
}

TEST_CASE("marginal sampling: Poisson variance at rho = 2, zero at rho = 0") {
    const auto& t = FugacityTable::shared("linear");
    Rng rng(99);
    const int draws = 400000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        auto k = static_cast<double>(measures::sample_marginal(t, 2.0, rng));
        sum += k;
        sq += k * k;
    }
    double mean = sum / draws;
    double var = sq / draws - mean * mean;
    CHECK(std::abs(mean - 2.0) < 0.01);
    CHECK(std::abs(var - 2.0) < 0.05);
    for (int i = 0; i < 100; ++i) CHECK(measures::sample_marginal(t, 0.0, rng) == 0);
}

TEST_CASE("sampled expected jump rate equals the flux") {
    Rng rng(5);
    for (const char* name : {"const1", "linear"}) {
        const auto& t = FugacityTable::shared(name);
        auto g = t.jump_rate();
        const int draws = 1000000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < draws; ++i) {
            double v = g(measures::sample_marginal(t, 1.0, rng));
            sum += v;
            sq += v * v;
        }
        double mean = sum / draws;
        double se = std::sqrt((sq / draws - mean * mean) / draws);
        CHECK(std::abs(mean - t.flux(1.0)) < 4.0 * se);
    }
}

TEST_CASE("product configuration: constant profile density and empty profile") {
    auto e = env::generate_environment(10000, 0.0, 1);
    const auto& t = FugacityTable::shared("const1");
    Rng rng(8);
    auto c = measures::sample_product_configuration(e, [](std::int64_t) { return 1.0; }, t, rng);
    double density = static_cast<double>(c.total) / static_cast<double>(2 * e.n);
    CHECK(std::abs(density - 1.0) < 0.02);  // CLT bound at sqrt(2/20000)
    auto zero = measures::sample_product_configuration(
        e, [](std::int64_t) { return 0.0; }, t, rng);
    CHECK(zero.total == 0);
}

TEST_CASE("product configuration: block means track a sine profile") {
    std::int64_t n = 4096;
    auto e = env::generate_environment(n, 0.0, 1);
    const auto& t = FugacityTable::shared("linear");
    Rng rng(77);
    auto profile = [n](std::int64_t j) {
        return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * static_cast<double>(j) /
                                    static_cast<double>(n));
    };
    auto c = measures::sample_product_configuration(e, profile, t, rng);
    std::int64_t block = 256;
    for (std::int64_t b = 0; b < n / block; ++b) {
        double acc = 0.0, expected = 0.0;
        for (std::int64_t j = b * block; j < (b + 1) * block; ++j) {
            acc += c.occupancy[static_cast<std::size_t>(2 * j)] +
                   c.occupancy[static_cast<std::size_t>(2 * j + 1)];
            expected += 2.0 * profile(j);
        }
        double se = std::sqrt(expected);  // Poisson block sum
        CHECK(std::abs(acc - expected) < 5.0 * se);
    }
}

TEST_CASE("rate function: zero at the mean, frozen Legendre oracle values") {
    const auto& c1 = FugacityTable::shared("const1");
    const auto& lin = FugacityTable::shared("linear");
    for (double rho : {0.4, 1.0, 2.5}) {
        CHECK(measures::rate_function(c1, rho, rho) <= 1e-12);
        CHECK(measures::rate_function(lin, rho, rho) <= 1e-12);
    }
    // geometric family at rho = 1: J(lambda) = 2 ln(4/3) + ln(2/3) at lambda = 2,
    // values frozen from an independent Legendre-transform computation
    CHECK(measures::rate_function(c1, 1.0, 2.0) ==
          doctest::Approx(0.16989903679539747).epsilon(1e-8));
    CHECK(measures::rate_function(c1, 1.0, 0.3) ==
          doctest::Approx(0.19882594962240974).epsilon(1e-8));
    CHECK(measures::rate_function(c1, 1.0, 5.0) ==
          doctest::Approx(1.4555158301618437).epsilon(1e-8));
    // Poisson family: J(lambda) = lambda ln(lambda/rho) - lambda + rho
    CHECK(measures::rate_function(lin, 2.0, 3.0) ==
          doctest::Approx(0.21639532432449315).epsilon(1e-8));
    CHECK(measures::rate_function(lin, 1.0, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-10));  // J(0) = log Z(phi) = rho for Poisson
    CHECK(std::isinf(measures::rate_function(c1, 1.0, 100.0)));
}

TEST_CASE("rate function is nonnegative and convex on a grid") {
    const auto& t = FugacityTable::shared("const1");
    std::vector<double> lambda;
    for (int i = 1; i <= 60; ++i) lambda.push_back(0.1 * static_cast<double>(i));
    std::vector<double> j(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        j[i] = measures::rate_function(t, 1.0, lambda[i]);
        CHECK(j[i] >= 0.0);
    }
    for (std::size_t i = 1; i + 1 < lambda.size(); ++i) {
        CHECK(j[i] <= 0.5 * (j[i - 1] + j[i + 1]) + 1e-12);
    }
}

TEST_CASE("curvature gap: zeros and the -1/6 anchor") {
    const auto& c1 = FugacityTable::shared("const1");
    const auto& lin = FugacityTable::shared("linear");
    CHECK(measures::curvature_gap(c1, 1.7, 0.8, 0.8) == 0.0);
    for (double lambda : {0.3, 1.0, 4.0}) {
        for (double rho : {0.5, 2.0}) {
            CHECK(std::abs(measures::curvature_gap(lin, 2.0, lambda, rho)) < 1e-9);
        }
    }
    // 2 * (Phi(2) - Phi(1) - 1 * Phi'(1)) = 2 * (2/3 - 1/2 - 1/4) = -1/6
    CHECK(measures::curvature_gap(c1, 1.0, 2.0, 1.0) ==
          doctest::Approx(-1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("proposition 4 check: linear family certifies for every gamma") {
    const auto& lin = FugacityTable::shared("linear");
    std::vector<double> rho_grid = {0.5, 1.0, 1.5};
    std::vector<double> lambda_grid;
    for (int i = 1; i <= 100; ++i) lambda_grid.push_back(0.5 * static_cast<double>(i));
    for (double gamma : {1e-4, 0.01, 1.0}) {
        double worst =
            measures::proposition4_check(lin, 1.5, 10.0, gamma, rho_grid, lambda_grid);
        CHECK(worst <= 0.0);
    }
}

TEST_CASE("proposition 4 check: gamma -> 0 limit approaches -min J") {
    const auto& c1 = FugacityTable::shared("const1");
    std::vector<double> rho_grid = {1.0};
    std::vector<double> lambda_grid = {0.5, 2.0, 3.0};  // excludes the mean
    double min_j = std::numeric_limits<double>::infinity();
    for (double l : lambda_grid) {
        min_j = std::min(min_j, measures::rate_function(c1, 1.0, l));
    }
    double prev = 1e300;
    for (double gamma : {1e-2, 1e-4, 1e-6, 1e-8}) {
        double worst = measures::proposition4_check(c1, 1.0, 5.0, gamma, rho_grid, lambda_grid);
        CHECK(worst <= prev);
        prev = worst;
    }
    CHECK(prev == doctest::Approx(-min_j).epsilon(1e-6));
}

TEST_CASE("slg flags match the families") {
    auto c1 = measures::const1_rate();
    auto lin = measures::linear_rate();
    CHECK(c1.slg);
    CHECK_FALSE(lin.slg);
    // limsup g(k)/k: tends to 0 for const1, stays 1 for linear
    CHECK(c1(1000000) / 1e6 < 1e-5);
    CHECK(lin(1000000) / 1e6 == 1.0);
    CHECK(c1(0) == 0.0);
    CHECK(lin(0) == 0.0);
    for (std::int64_t k = 0; k < 100; ++k) {
        CHECK(c1(k + 1) >= c1(k));
        CHECK(lin(k + 1) >= lin(k));
    }
}

TEST_CASE("fugacity csv export has the audit columns") {
    const auto& t = FugacityTable::shared("const1");
    std::ostringstream os;
    t.write_csv(os);
    std::string csv = os.str();
    CHECK(csv.substr(0, 8) == "phi,Z,R\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2050);
}

} // TEST_SUITE
