// test_environment.cpp — generation grammar, edge tables, tiles, census.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "zrp/environment.hpp"
#include "zrp/rng.hpp"

using namespace zrp;
using env::Figure;

TEST_SUITE("environment") {

TEST_CASE("p = 0 forces the all-1 sequence") {
    auto e = env::generate_environment(4, 0.0, 12345);
    CHECK(e.to_string() == "1111");
    CHECK(env::validate_environment(e).ok());
}

TEST_CASE("p -> 1 forces alternating pairs on even n") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto e = env::generate_environment(6, 1.0 - 1e-12, seed);
        CHECK(e.to_string() == "232323");
    }
    CHECK_THROWS_AS(env::generate_environment(6, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(env::generate_environment(1, 0.5, 1), ValidationError);
}

TEST_CASE("pair fraction tracks p within 3 binomial standard errors") {
    std::int64_t n = 100000;
    double p = 0.4;
    auto e = env::generate_environment(n, p, 42);
    std::int64_t pairs = static_cast<std::int64_t>(
        std::count(e.figures.begin(), e.figures.end(), Figure::F2));
    std::int64_t blocks = n - pairs;  // one decision per '1' and per '23'
    double fraction = static_cast<double>(pairs) / static_cast<double>(blocks);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(blocks));
    CHECK(std::abs(fraction - p) < 3.0 * se);
}

TEST_CASE("determinism: identical (n, p, seed) gives identical figures") {
    auto a = env::generate_environment(5000, 0.37, 99);
    auto b = env::generate_environment(5000, 0.37, 99);
    CHECK(a.to_string() == b.to_string());
    auto c = env::generate_environment(5000, 0.37, 100);
    CHECK(a.to_string() != c.to_string());
}

TEST_CASE("validator flags grammar violations") {
    env::Environment bad;
    bad.n = 3;
    bad.figures = {Figure::F2, Figure::F1, Figure::F3};
    auto report = env::validate_environment(bad);
    CHECK_FALSE(report.ok());
    bool saw_grammar = false;
    for (const auto& v : report.violations) {
        if (v.find("F2") != std::string::npos || v.find("F3") != std::string::npos) {
            saw_grammar = true;
        }
    }
    CHECK(saw_grammar);
}

TEST_CASE("generator output is valid across a seed sweep") {
    Rng mix(7);
    for (int i = 0; i < 10000; ++i) {
        std::int64_t n = 2 + static_cast<std::int64_t>(mix.uniform01() * 48);
        double p = mix.uniform01() * 0.95;
        auto e = env::generate_environment(n, p, mix.next_u64());
        auto report = env::validate_environment(e);
        if (!report.ok()) {
            CAPTURE(e.to_string());
            REQUIRE(report.ok());
        }
    }
}

TEST_CASE("edge table for [F1,F2,F3] matches the per-figure generator terms") {
    auto e = env::environment_from_string("123");
    auto edges = env::build_edges(e);
    REQUIRE(edges.source.size() == 12);
    std::set<std::pair<int, int>> got;
    for (std::size_t i = 0; i < edges.source.size(); ++i) {
        got.insert({edges.source[i], edges.target[i]});
    }
    auto v = [](std::int64_t site, int row) { return env::vertex_index(site, row); };
    // transcribed by hand from the three per-figure generator terms
    std::set<std::pair<int, int>> expected = {
        // figure 1 between sites 0 and 1
        {v(0, 1), v(1, 1)},
        {v(0, -1), v(1, -1)},
        {v(1, 1), v(0, -1)},
        {v(1, -1), v(0, 1)},
        // figure 2 between sites 1 and 2
        {v(1, 1), v(2, 1)},
        {v(1, -1), v(2, 1)},
        {v(2, -1), v(1, 1)},
        {v(2, -1), v(1, -1)},
        // figure 3 between sites 2 and 0
        {v(2, 1), v(0, 1)},
        {v(2, 1), v(0, -1)},
        {v(0, 1), v(2, -1)},
        {v(0, -1), v(2, -1)},
    };
    CHECK(got == expected);
}

TEST_CASE("all-F1 n=2 has 8 edges and in/out degree 2 everywhere") {
    auto e = env::environment_from_string("11");
    auto edges = env::build_edges(e);
    CHECK(edges.source.size() == 8);
    std::vector<int> in(4, 0), out(4, 0);
    for (std::size_t i = 0; i < edges.source.size(); ++i) {
        ++out[static_cast<std::size_t>(edges.source[i])];
        ++in[static_cast<std::size_t>(edges.target[i])];
    }
    for (int d : in) CHECK(d == 2);
    for (int d : out) CHECK(d == 2);
}

TEST_CASE("edge reversal flips every edge") {
    auto e = env::generate_environment(16, 0.5, 5);
    auto edges = env::build_edges(e);
    auto rev = edges.reversed();
    std::multiset<std::pair<int, int>> fwd, bwd;
    for (std::size_t i = 0; i < edges.source.size(); ++i) {
        fwd.insert({edges.source[i], edges.target[i]});
        bwd.insert({rev.target[i], rev.source[i]});
    }
    CHECK(fwd == bwd);
}

TEST_CASE("all-F1 tiles are the site pairs, kappa = 1") {
    auto e = env::environment_from_string("11111");
    auto d = env::decompose_tiles(e);
    CHECK(d.t_n == 5);
    CHECK(d.kappa_n == doctest::Approx(1.0));
    for (const auto& tile : d.tiles) {
        CHECK(tile.size() == 2);
        std::set<std::int32_t> verts(tile.vertices.begin(), tile.vertices.end());
        std::set<std::int32_t> expected = {env::vertex_index(tile.centre_site, 1),
                                           env::vertex_index(tile.centre_site, -1)};
        CHECK(verts == expected);
    }
}

TEST_CASE("periodic [F1,F2,F3] decomposes into the two hand-computed tiles") {
    auto e = env::environment_from_string("123");
    auto d = env::decompose_tiles(e);
    REQUIRE(d.t_n == 2);
    CHECK(d.kappa_n == doctest::Approx(1.5));
    // site 0 (case 3|1): {(2,-1),(0,1),(0,-1)}; site 1 (case 1|2): {(1,1),(1,-1),(2,1)}
    std::set<std::int32_t> tile0(d.tiles[0].vertices.begin(), d.tiles[0].vertices.end());
    std::set<std::int32_t> tile1(d.tiles[1].vertices.begin(), d.tiles[1].vertices.end());
    CHECK(d.tiles[0].centre_site == 0);
    CHECK(d.tiles[1].centre_site == 1);
    CHECK(tile0 == std::set<std::int32_t>{env::vertex_index(2, -1), env::vertex_index(0, 1),
                                          env::vertex_index(0, -1)});
    CHECK(tile1 == std::set<std::int32_t>{env::vertex_index(1, 1), env::vertex_index(1, -1),
                                          env::vertex_index(2, 1)});
    CHECK(d.centre_of[2] == -1);
}

TEST_CASE("periodic [F2,F3] gives one 4-vertex tile per pair, kappa = 2") {
    auto e = env::environment_from_string("2323");
    auto d = env::decompose_tiles(e);
    CHECK(d.t_n == 2);
    CHECK(d.kappa_n == doctest::Approx(2.0));
    for (const auto& tile : d.tiles) CHECK(tile.size() == 4);
}

TEST_CASE("tiles partition the vertices with sizes in {2,3,4}") {
    Rng mix(31);
    for (int i = 0; i < 500; ++i) {
        std::int64_t n = 3 + static_cast<std::int64_t>(mix.uniform01() * 60);
        double p = mix.uniform01() * 0.9;
        auto e = env::generate_environment(n, p, mix.next_u64());
        auto d = env::decompose_tiles(e);
        std::vector<int> cover(static_cast<std::size_t>(2 * n), 0);
        std::int64_t vertex_total = 0;
        for (const auto& tile : d.tiles) {
            CHECK(tile.size() >= 2);
            CHECK(tile.size() <= 4);
            vertex_total += tile.size();
            for (std::int32_t v : tile.vertices) ++cover[static_cast<std::size_t>(v)];
        }
        CHECK(vertex_total == 2 * n);
        for (int c : cover) CHECK(c == 1);
        // non-centres are exactly the sites between an F2 and an F3
        for (std::int64_t x = 0; x < n; ++x) {
            bool between_pair =
                e.figures[static_cast<std::size_t>((x + n - 1) % n)] == Figure::F2;
            CHECK((d.centre_of[static_cast<std::size_t>(x)] == -1) == between_pair);
        }
    }
}

TEST_CASE("kappa_n equals 1 + realized pair fraction exactly") {
    auto e = env::generate_environment(100000, 0.4, 7);
    auto d = env::decompose_tiles(e);
    std::int64_t pairs = static_cast<std::int64_t>(
        std::count(e.figures.begin(), e.figures.end(), Figure::F2));
    std::int64_t blocks = e.n - pairs;
    CHECK(d.t_n == blocks);
    double p_hat = static_cast<double>(pairs) / static_cast<double>(blocks);
    CHECK(d.kappa_n == doctest::Approx(1.0 + p_hat).epsilon(1e-14));
}

TEST_CASE("shape census: all-F1 concentrates on m = 4l+2") {
    auto e = env::environment_from_string("111111111");
    auto d = env::decompose_tiles(e);
    for (std::int64_t l : {0, 1, 2, 3}) {
        auto counts = env::shape_census(d, l);
        CHECK(counts[0] == d.t_n);  // every window holds 2(2l+1) vertices
        for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] == 0);
    }
}

TEST_CASE("shape census: all-pairs graph concentrates on m = 4(2l+1)") {
    auto e = env::environment_from_string("23232323");
    auto d = env::decompose_tiles(e);
    std::int64_t l = 1;
    auto counts = env::shape_census(d, l);
    std::int64_t m_expected = 4 * (2 * l + 1);  // 12
    CHECK(counts[static_cast<std::size_t>(m_expected - (4 * l + 2))] == d.t_n);
}

TEST_CASE("shape census sums to T_N on mixed environments") {
    auto e = env::generate_environment(5000, 0.4, 3);
    auto d = env::decompose_tiles(e);
    std::int64_t l = 2;
    auto counts = env::shape_census(d, l);
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    CHECK(total == d.t_n);
    CHECK_THROWS_AS(env::shape_census(d, d.t_n), ValidationError);
}

TEST_CASE("environment file round trip re-validates") {
    auto e = env::generate_environment(64, 0.3, 21);
    env::save_environment(e, "test_env_roundtrip.txt");
    auto loaded = env::load_environment("test_env_roundtrip.txt");
    CHECK(loaded.to_string() == e.to_string());
    CHECK(loaded.content_hash() == e.content_hash());
}

} // TEST_SUITE
