// environment.hpp — the quenched environment: a randomly oriented ladder
// graph encoded as a cyclic figure sequence, its oriented edge set, and the
// tile decomposition it induces.
//
// Sites 0..n-1 live on a ring; each site j carries an upper vertex (j,+1)
// and a lower vertex (j,-1). Figure figures[j] fixes the orientation of the
// four edges between sites j and j+1 (mod n). Flat vertex index:
// 2*site + (row == -1 ? 1 : 0).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zrp/common.hpp"

namespace zrp::env {

enum class Figure : std::uint8_t { F1 = 1, F2 = 2, F3 = 3 };

struct VertexId {
    std::int64_t site = 0;
    int row = 1;  // +1 upper, -1 lower
    bool operator==(const VertexId&) const = default;
};

inline std::int32_t vertex_index(std::int64_t site, int row) {
    return static_cast<std::int32_t>(2 * site + (row < 0 ? 1 : 0));
}

inline VertexId vertex_of_index(std::int32_t v) {
    return VertexId{v / 2, (v % 2) == 0 ? 1 : -1};
}

struct Environment {
    std::int64_t n = 0;              // site count
    std::vector<Figure> figures;     // length n, figures[j] between j and j+1
    std::uint64_t seed = 0;
    double pair_prob = 0.0;

    std::string to_string() const;   // characters '1','2','3'
    std::uint64_t content_hash() const;
};

// Walks the ring emitting "1" with probability 1-p and the pair "23" with
// probability p at each decision point; a pair drawn with a single slot left
// before wrap-around degrades to "1" (the truncation realisation of the
// no-split-pair conditioning).
Environment generate_environment(std::int64_t n, double p, std::uint64_t seed);

// Builds an Environment from a figure string; grammar is re-validated.
Environment environment_from_string(std::string_view figures,
                                    std::uint64_t seed = 0, double pair_prob = 0.0);

void save_environment(const Environment& e, const std::string& path);
Environment load_environment(const std::string& path);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_environment(const Environment& e);

struct OrientedEdgeSet {
    std::int64_t n_sites = 0;
    std::int64_t n_vertices = 0;
    std::vector<std::int32_t> source;   // 4n oriented edges
    std::vector<std::int32_t> target;
    std::vector<std::int32_t> out;      // out[2v], out[2v+1]: the two targets of v

    OrientedEdgeSet reversed() const;   // every edge flipped (time-reversed generator)
};

OrientedEdgeSet build_edges(const Environment& e);

struct Tile {
    std::int32_t index = 0;
    std::int32_t centre_site = 0;
    std::vector<std::int32_t> vertices;  // flat vertex ids, size 2..4
    int size() const { return static_cast<int>(vertices.size()); }
};

struct TileDecomposition {
    std::vector<Tile> tiles;             // ordered by centre site
    std::vector<std::int32_t> centre_of; // site -> tile index, -1 if not a centre
    std::vector<std::int32_t> tile_of;   // flat vertex -> tile index
    std::int64_t t_n = 0;                // tile count
    double kappa_n = 0.0;                // n / t_n
};

TileDecomposition decompose_tiles(const Environment& e);

// Counts, over all centres j, how many vertices the 2l+1 tiles around j
// hold. counts[m - (4l+2)] for m in [4l+2, 8l+4]; entries sum to t_n.
std::vector<std::int64_t> shape_census(const TileDecomposition& d, std::int64_t l);

} // namespace zrp::env
