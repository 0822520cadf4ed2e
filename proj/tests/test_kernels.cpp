// test_kernels.cpp — scalar/AVX2 equivalence and correctness of the
// data-parallel kernels.

#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "zrp/interp.hpp"
#include "zrp/kernels.hpp"
#include "zrp/rng.hpp"

using namespace zrp;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform01();
    return v;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("heat_step matches a hand-rolled periodic Laplacian") {
    Rng rng(7);
    for (std::size_t n : {3u, 4u, 5u, 17u, 256u}) {
        auto rho = random_vector(n, rng, 0.0, 2.0);
        auto phi = random_vector(n, rng, 0.0, 1.0);
        double c = 0.3;
        std::vector<double> expected(n);
        for (std::size_t i = 0; i < n; ++i) {
            double pl = phi[(i + n - 1) % n], pr = phi[(i + 1) % n];
            expected[i] = rho[i] + c * ((pl + pr) - 2.0 * phi[i]);
        }
        std::vector<double> got(n);
        kernels::scalar_backend().heat_step(rho.data(), phi.data(), c, got.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(expected[i]));
    }
}

TEST_CASE("reductions agree with std::accumulate") {
    Rng rng(11);
    auto v = random_vector(1000, rng, -3.0, 3.0);
    auto w = random_vector(1000, rng, -3.0, 3.0);
    const auto& b = kernels::scalar_backend();
    CHECK(b.sum(v.data(), v.size()) ==
          doctest::Approx(std::accumulate(v.begin(), v.end(), 0.0)));
    double l1 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) l1 += std::abs(v[i] - w[i]);
    CHECK(b.l1_diff(v.data(), w.data(), v.size()) == doctest::Approx(l1));
    double mn, mx;
    b.minmax(v.data(), v.size(), &mn, &mx);
    CHECK(mn == *std::min_element(v.begin(), v.end()));
    CHECK(mx == *std::max_element(v.begin(), v.end()));
}

TEST_CASE("avx2 variant is bit-identical on maps, close on reductions") {
    if (!kernels::avx2_available()) return;
    const auto& scalar = kernels::scalar_backend();
    const auto& avx2 = kernels::avx2_backend();
    Rng rng(13);
    for (std::size_t n : {3u, 4u, 7u, 8u, 33u, 1024u, 1025u}) {
        auto rho = random_vector(n, rng, 0.0, 2.0);
        auto phi = random_vector(n, rng, 0.0, 1.0);
        std::vector<double> a(n), b(n);
        scalar.heat_step(rho.data(), phi.data(), 0.177, a.data(), n);
        avx2.heat_step(rho.data(), phi.data(), 0.177, b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);

        double s1 = scalar.sum(rho.data(), n);
        double s2 = avx2.sum(rho.data(), n);
        CHECK(s2 == doctest::Approx(s1).epsilon(1e-12));
        double d1 = scalar.l1_diff(rho.data(), phi.data(), std::min(rho.size(), phi.size()));
        double d2 = avx2.l1_diff(rho.data(), phi.data(), std::min(rho.size(), phi.size()));
        CHECK(d2 == doctest::Approx(d1).epsilon(1e-12));
        double mn1, mx1, mn2, mx2;
        scalar.minmax(rho.data(), n, &mn1, &mx1);
        avx2.minmax(rho.data(), n, &mn2, &mx2);
        CHECK(mn1 == mn2);
        CHECK(mx1 == mx2);
    }
}

TEST_CASE("hermite_eval is bit-identical across backends") {
    if (!kernels::avx2_available()) return;
    Rng rng(17);
    std::size_t m = 64;
    std::vector<double> y(m), d(m);
    for (std::size_t i = 0; i < m; ++i) {
        double x = static_cast<double>(i) / 8.0;
        y[i] = std::sin(x);
        d[i] = std::cos(x) / 8.0;
    }
    auto xs = random_vector(501, rng, -1.0, 9.0);  // includes out-of-range clamps
    std::vector<double> out1(xs.size()), out2(xs.size());
    kernels::scalar_backend().hermite_eval(xs.data(), out1.data(), xs.size(), y.data(),
                                           d.data(), 0.0, 1.0, m);
    kernels::avx2_backend().hermite_eval(xs.data(), out2.data(), xs.size(), y.data(),
                                         d.data(), 0.0, 1.0, m);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(out1[i] == out2[i]);
}

TEST_CASE("HermiteTable reproduces smooth functions and stays monotone") {
    // exact-derivative table of a smooth monotone function
    std::size_t m = 513;
    double h = 2.0 / static_cast<double>(m - 1);
    std::vector<double> y(m), d(m);
    for (std::size_t i = 0; i < m; ++i) {
        double x = h * static_cast<double>(i);
        y[i] = x / (1.0 + x);
        d[i] = 1.0 / ((1.0 + x) * (1.0 + x));
    }
    auto table = HermiteTable::from_values_and_derivs(0.0, h, y, d);
    Rng rng(23);
    double prev = -1.0;
    for (int k = 0; k <= 2000; ++k) {
        double x = 2.0 * static_cast<double>(k) / 2000.0;
        double got = table(x);
        CHECK(std::abs(got - x / (1.0 + x)) < 1e-10);
        CHECK(got >= prev);  // monotone data stays monotone
        prev = got;
    }
}

} // TEST_SUITE
