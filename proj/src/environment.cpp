// environment.cpp — generation, validation, edge construction, tiles.

#include "zrp/environment.hpp"

#include <array>
#include <fstream>

#include "zrp/rng.hpp"

namespace zrp::env {

namespace {

char figure_char(Figure f) { return static_cast<char>('0' + static_cast<int>(f)); }

Figure figure_from_char(char c) {
    switch (c) {
        case '1': return Figure::F1;
        case '2': return Figure::F2;
        case '3': return Figure::F3;
        default: throw ValidationError(std::string("bad figure character '") + c + "'");
    }
}

} // namespace

std::string Environment::to_string() const {
    std::string s;
    s.reserve(figures.size());
    for (Figure f : figures) s.push_back(figure_char(f));
    return s;
}

std::uint64_t Environment::content_hash() const { return fnv1a64(to_string()); }

Environment generate_environment(std::int64_t n, double p, std::uint64_t seed) {
    if (n < 2) throw ValidationError("generate_environment: n must be >= 2");
    if (!(p >= 0.0 && p < 1.0)) {
        throw ValidationError("generate_environment: p must lie in [0,1)");
    }
    Environment e;
    e.n = n;
    e.seed = seed;
    e.pair_prob = p;
    e.figures.resize(static_cast<std::size_t>(n), Figure::F1);
    Rng rng(seed);
    std::int64_t pos = 0;
    while (pos < n) {
        bool pair = rng.bernoulli(p);
        if (pair && n - pos >= 2) {
            e.figures[static_cast<std::size_t>(pos)] = Figure::F2;
            e.figures[static_cast<std::size_t>(pos + 1)] = Figure::F3;
            pos += 2;
        } else {
            e.figures[static_cast<std::size_t>(pos)] = Figure::F1;
            pos += 1;
        }
    }
    return e;
}

Environment environment_from_string(std::string_view figures, std::uint64_t seed,
                                    double pair_prob) {
    Environment e;
    e.n = static_cast<std::int64_t>(figures.size());
    e.seed = seed;
    e.pair_prob = pair_prob;
    e.figures.reserve(figures.size());
    for (char c : figures) e.figures.push_back(figure_from_char(c));
    if (e.n < 2) throw ValidationError("environment: need at least 2 sites");
    auto report = validate_environment(e);
    if (!report.ok()) {
        throw ValidationError("environment: " + report.violations.front());
    }
    return e;
}

void save_environment(const Environment& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for write: " + path);
    out << e.to_string() << '\n';
}

Environment load_environment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open environment file: " + path);
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return environment_from_string(line);
}

ValidationReport validate_environment(const Environment& e) {
    ValidationReport report;
    auto add = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };
    std::int64_t n = e.n;
    if (n < 2 || static_cast<std::int64_t>(e.figures.size()) != n) {
        add("size: need n >= 2 and figures of length n");
        return report;
    }
    std::int64_t n2 = 0, n3 = 0;
    for (std::int64_t j = 0; j < n; ++j) {
        Figure f = e.figures[static_cast<std::size_t>(j)];
        Figure next = e.figures[static_cast<std::size_t>((j + 1) % n)];
        if (f == Figure::F2) {
            ++n2;
            if (next != Figure::F3) {
                add("grammar: F2 at figure " + std::to_string(j) + " not followed by F3");
            }
        }
        if (f == Figure::F3) {
            ++n3;
            Figure prev = e.figures[static_cast<std::size_t>((j + n - 1) % n)];
            if (prev != Figure::F2) {
                add("grammar: F3 at figure " + std::to_string(j) + " not preceded by F2");
            }
        }
    }
    if (n2 != n3) add("grammar: count of F2 differs from count of F3");
    if (!report.ok()) return report;

    // Degree and cut checks read off the constructed edge set.
    OrientedEdgeSet edges;
    try {
        edges = build_edges(e);
    } catch (const std::exception& ex) {
        add(std::string("edges: ") + ex.what());
        return report;
    }
    std::vector<int> in_deg(static_cast<std::size_t>(edges.n_vertices), 0);
    std::vector<int> out_deg(static_cast<std::size_t>(edges.n_vertices), 0);
    std::vector<int> cut_right(static_cast<std::size_t>(n), 0);
    std::vector<int> cut_left(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < edges.source.size(); ++k) {
        std::int32_t s = edges.source[k];
        std::int32_t t = edges.target[k];
        ++out_deg[static_cast<std::size_t>(s)];
        ++in_deg[static_cast<std::size_t>(t)];
        // edges are emitted four per figure, in figure order; for n = 2 the
        // two boundaries join the same site pair, so the figure index is the
        // only way to attribute a crossing to its cut
        std::int64_t fig = static_cast<std::int64_t>(k) / 4;
        std::int64_t sj = s / 2, tj = t / 2;
        if (sj == fig && tj == (fig + 1) % n) {
            ++cut_right[static_cast<std::size_t>(fig)];
        } else if (sj == (fig + 1) % n && tj == fig) {
            ++cut_left[static_cast<std::size_t>(fig)];
        } else {
            add("edges: edge does not join the sites of its figure");
        }
    }
    for (std::int64_t v = 0; v < edges.n_vertices; ++v) {
        if (in_deg[static_cast<std::size_t>(v)] != 2) {
            add("degree: vertex " + std::to_string(v) + " has in-degree " +
                std::to_string(in_deg[static_cast<std::size_t>(v)]));
        }
        if (out_deg[static_cast<std::size_t>(v)] != 2) {
            add("degree: vertex " + std::to_string(v) + " has out-degree " +
                std::to_string(out_deg[static_cast<std::size_t>(v)]));
        }
    }
    for (std::int64_t j = 0; j < n; ++j) {
        if (cut_right[static_cast<std::size_t>(j)] != 2 ||
            cut_left[static_cast<std::size_t>(j)] != 2) {
            add("cut: boundary between sites " + std::to_string(j) + " and " +
                std::to_string((j + 1) % n) + " is not 2+2");
        }
    }
    return report;
}

OrientedEdgeSet build_edges(const Environment& e) {
    std::int64_t n = e.n;
    if (n < 2 || static_cast<std::int64_t>(e.figures.size()) != n) {
        throw ValidationError("build_edges: malformed environment");
    }
    OrientedEdgeSet es;
    es.n_sites = n;
    es.n_vertices = 2 * n;
    es.source.reserve(static_cast<std::size_t>(4 * n));
    es.target.reserve(static_cast<std::size_t>(4 * n));
    auto emit = [&es](std::int32_t s, std::int32_t t) {
        es.source.push_back(s);
        es.target.push_back(t);
    };
    for (std::int64_t j = 0; j < n; ++j) {
        std::int64_t k = (j + 1) % n;
        std::int32_t ju = vertex_index(j, 1), jl = vertex_index(j, -1);
        std::int32_t ku = vertex_index(k, 1), kl = vertex_index(k, -1);
        switch (e.figures[static_cast<std::size_t>(j)]) {
            case Figure::F1:
                emit(ju, ku);
                emit(jl, kl);
                emit(ku, jl);
                emit(kl, ju);
                break;
            case Figure::F2:
                emit(ju, ku);
                emit(jl, ku);
                emit(kl, ju);
                emit(kl, jl);
                break;
            case Figure::F3:
                emit(ju, ku);
                emit(ju, kl);
                emit(ku, jl);
                emit(kl, jl);
                break;
        }
    }
    es.out.assign(static_cast<std::size_t>(2 * es.n_vertices), -1);
    std::vector<int> filled(static_cast<std::size_t>(es.n_vertices), 0);
    for (std::size_t i = 0; i < es.source.size(); ++i) {
        std::int32_t s = es.source[i];
        int slot = filled[static_cast<std::size_t>(s)]++;
        if (slot > 1) throw ValidationError("build_edges: vertex with out-degree > 2");
        es.out[static_cast<std::size_t>(2 * s + slot)] = es.target[i];
    }
    for (std::int64_t v = 0; v < es.n_vertices; ++v) {
        if (filled[static_cast<std::size_t>(v)] != 2) {
            throw ValidationError("build_edges: vertex with out-degree != 2");
        }
    }
    return es;
}

OrientedEdgeSet OrientedEdgeSet::reversed() const {
    OrientedEdgeSet r;
    r.n_sites = n_sites;
    r.n_vertices = n_vertices;
    r.source = target;
    r.target = source;
    r.out.assign(out.size(), -1);
    std::vector<int> filled(static_cast<std::size_t>(n_vertices), 0);
    for (std::size_t i = 0; i < r.source.size(); ++i) {
        std::int32_t s = r.source[i];
        int slot = filled[static_cast<std::size_t>(s)]++;
        if (slot > 1) throw ValidationError("reversed: vertex with out-degree > 2");
        r.out[static_cast<std::size_t>(2 * s + slot)] = r.target[i];
    }
    return r;
}

TileDecomposition decompose_tiles(const Environment& e) {
    auto report = validate_environment(e);
    if (!report.ok()) {
        throw ValidationError("decompose_tiles: " + report.violations.front());
    }
    std::int64_t n = e.n;
    TileDecomposition d;
    d.centre_of.assign(static_cast<std::size_t>(n), -1);
    d.tile_of.assign(static_cast<std::size_t>(2 * n), -1);
    auto fig = [&e, n](std::int64_t j) {
        return e.figures[static_cast<std::size_t>(((j % n) + n) % n)];
    };
    for (std::int64_t x = 0; x < n; ++x) {
        Figure left = fig(x - 1);
        Figure right = fig(x);
        if (left == Figure::F2) continue;  // (2|3): not a centre
        Tile t;
        t.index = static_cast<std::int32_t>(d.tiles.size());
        t.centre_site = static_cast<std::int32_t>(x);
        t.vertices.push_back(vertex_index(x, 1));
        t.vertices.push_back(vertex_index(x, -1));
        if (left == Figure::F3) t.vertices.push_back(vertex_index((x + n - 1) % n, -1));
        if (right == Figure::F2) t.vertices.push_back(vertex_index((x + 1) % n, 1));
        d.centre_of[static_cast<std::size_t>(x)] = t.index;
        for (std::int32_t v : t.vertices) {
            if (d.tile_of[static_cast<std::size_t>(v)] != -1) {
                throw ValidationError("decompose_tiles: vertex claimed by two tiles");
            }
            d.tile_of[static_cast<std::size_t>(v)] = t.index;
        }
        d.tiles.push_back(std::move(t));
    }
    for (std::int64_t v = 0; v < 2 * n; ++v) {
        if (d.tile_of[static_cast<std::size_t>(v)] == -1) {
            throw ValidationError("decompose_tiles: vertex not covered by any tile");
        }
    }
    d.t_n = static_cast<std::int64_t>(d.tiles.size());
    d.kappa_n = static_cast<double>(n) / static_cast<double>(d.t_n);
    return d;
}

std::vector<std::int64_t> shape_census(const TileDecomposition& d, std::int64_t l) {
    std::int64_t t = d.t_n;
    if (l < 0 || 2 * l + 1 > t) {
        throw ValidationError("shape_census: window 2l+1 exceeds tile count");
    }
    // prefix over a doubled tile-size array for cyclic windows
    std::vector<std::int64_t> prefix(static_cast<std::size_t>(2 * t + 1), 0);
    for (std::int64_t k = 0; k < 2 * t; ++k) {
        prefix[static_cast<std::size_t>(k + 1)] =
            prefix[static_cast<std::size_t>(k)] +
            d.tiles[static_cast<std::size_t>(k % t)].size();
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(4 * l + 3), 0);
    for (std::int64_t j = 0; j < t; ++j) {
        std::int64_t lo = (((j - l) % t) + t) % t;  // window start in [0, t)
        std::int64_t m = prefix[static_cast<std::size_t>(lo + 2 * l + 1)] -
                         prefix[static_cast<std::size_t>(lo)];
        ++counts[static_cast<std::size_t>(m - (4 * l + 2))];
    }
    return counts;
}

} // namespace zrp::env
