// analysis.cpp — windowed statistics via doubled prefix sums.

#include "zrp/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "zrp/kernels.hpp"

namespace zrp::analysis {

namespace {

void check_window(const env::TileDecomposition& d, std::int64_t l) {
    if (l < 0 || 2 * l + 1 > d.t_n) {
        throw ValidationError("window 2l+1 exceeds the tile count");
    }
}

// prefix[k+1] - prefix[k0] over a doubled cyclic array of length t
struct CyclicPrefix {
    std::vector<double> prefix;
    std::int64_t t;

    explicit CyclicPrefix(std::span<const double> values)
        : prefix(2 * values.size() + 1, 0.0), t(static_cast<std::int64_t>(values.size())) {
        for (std::int64_t k = 0; k < 2 * t; ++k) {
            prefix[static_cast<std::size_t>(k + 1)] =
                prefix[static_cast<std::size_t>(k)] +
                values[static_cast<std::size_t>(k % t)];
        }
    }

    // sum over indices j-l .. j+l (mod t)
    double window(std::int64_t j, std::int64_t l) const {
        std::int64_t lo = (((j - l) % t) + t) % t;
        return prefix[static_cast<std::size_t>(lo + 2 * l + 1)] -
               prefix[static_cast<std::size_t>(lo)];
    }
};

} // namespace

TileAverages tile_averages(const Configuration& config, const env::TileDecomposition& d,
                           const measures::JumpRate& g, std::int64_t l) {
    check_window(d, l);
    std::int64_t t = d.t_n;
    TileAverages out;
    out.l = l;
    out.omega_hat.resize(static_cast<std::size_t>(t));
    std::vector<double> sizes(static_cast<std::size_t>(t));
    std::vector<double> centre_rates(static_cast<std::size_t>(t));
    for (std::int64_t j = 0; j < t; ++j) {
        const env::Tile& tile = d.tiles[static_cast<std::size_t>(j)];
        double sum = 0.0;
        for (std::int32_t v : tile.vertices) {
            sum += config.occupancy[static_cast<std::size_t>(v)];
        }
        out.omega_hat[static_cast<std::size_t>(j)] = sum;
        sizes[static_cast<std::size_t>(j)] = static_cast<double>(tile.size());
        std::int32_t up = env::vertex_index(tile.centre_site, 1);
        std::int32_t down = env::vertex_index(tile.centre_site, -1);
        centre_rates[static_cast<std::size_t>(j)] =
            g(config.occupancy[static_cast<std::size_t>(up)]) +
            g(config.occupancy[static_cast<std::size_t>(down)]);
    }
    CyclicPrefix hat(out.omega_hat), size(sizes), rate(centre_rates);
    out.omega_l.resize(static_cast<std::size_t>(t));
    out.omega_bar_l.resize(static_cast<std::size_t>(t));
    out.g_l.resize(static_cast<std::size_t>(t));
    double denom_tiles = static_cast<double>(2 * l + 1);
    double denom_pairs = static_cast<double>(4 * l + 2);
    for (std::int64_t j = 0; j < t; ++j) {
        double particles = hat.window(j, l);
        out.omega_l[static_cast<std::size_t>(j)] = particles / size.window(j, l);
        out.omega_bar_l[static_cast<std::size_t>(j)] = particles / denom_tiles;
        out.g_l[static_cast<std::size_t>(j)] = rate.window(j, l) / denom_pairs;
    }
    return out;
}

double one_block_statistic(const Configuration& config, const env::TileDecomposition& d,
                           const measures::FugacityTable& table, std::int64_t l) {
    TileAverages avg = tile_averages(config, d, table.jump_rate(), l);
    double acc = 0.0;
    for (std::size_t j = 0; j < avg.g_l.size(); ++j) {
        acc += std::abs(avg.g_l[j] - table.flux_interp(avg.omega_l[j]));
    }
    return acc / static_cast<double>(d.t_n);
}

double section5_statistic(const Configuration& config, const env::TileDecomposition& d,
                          const measures::FugacityTable& table, std::int64_t l) {
    TileAverages avg = tile_averages(config, d, table.jump_rate(), l);
    double acc = 0.0;
    for (std::size_t j = 0; j < avg.g_l.size(); ++j) {
        acc += std::abs(2.0 * avg.g_l[j] - 2.0 * table.flux_interp(avg.omega_l[j]));
    }
    return acc / static_cast<double>(d.t_n);
}

double c_of_l(const env::TileDecomposition& d, std::int64_t l) {
    check_window(d, l);
    std::int64_t t = d.t_n;
    std::vector<double> sizes(static_cast<std::size_t>(t));
    for (std::int64_t j = 0; j < t; ++j) {
        sizes[static_cast<std::size_t>(j)] =
            static_cast<double>(d.tiles[static_cast<std::size_t>(j)].size());
    }
    CyclicPrefix size(sizes);
    double inv_kappa = 1.0 / d.kappa_n;
    double num = static_cast<double>(4 * l + 2);
    double acc = 0.0;
    for (std::int64_t j = 0; j < t; ++j) {
        acc += std::abs(inv_kappa - num / size.window(j, l));
    }
    return acc / static_cast<double>(t);
}

std::vector<double> eval_F(const pde::DensityProfile& rho,
                           const measures::FugacityTable& table, double kappa) {
    std::size_t m = rho.size();
    if (m < 3) throw ValidationError("eval_F: need at least 3 grid points");
    double dx = 1.0 / static_cast<double>(m);
    std::vector<double> phi(m), f(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (rho.values[i] <= 0.0) {
            throw NumericalError("eval_F: density touches zero, F is singular");
        }
    }
    table.flux_batch(rho.values, phi);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t l = (i + m - 1) % m, r = (i + 1) % m;
        double lap = ((phi[l] + phi[r]) - 2.0 * phi[i]) / (dx * dx);
        f[i] = kappa * lap / phi[i];
    }
    return f;
}

double eval_G(const measures::FugacityTable& table, double kappa, double gamma,
              double F_value, double rho_ref, double lambda) {
    double bregman = table.flux(lambda) - table.flux(rho_ref) -
                     (lambda - rho_ref) * table.flux_derivative(rho_ref);
    return 2.0 * kappa * gamma * F_value * bregman;
}

EmpiricalProfile empirical_profile(std::span<const Configuration> replicas,
                                   std::int64_t n_sites, std::int64_t block_size) {
    if (replicas.empty()) throw ValidationError("empirical_profile: no snapshots");
    if (block_size <= 0 || n_sites % block_size != 0) {
        throw ValidationError("empirical_profile: block size must divide the site count");
    }
    std::int64_t blocks = n_sites / block_size;
    std::size_t r_count = replicas.size();
    EmpiricalProfile out;
    out.n_sites = n_sites;
    out.block_size = block_size;
    out.mean.assign(static_cast<std::size_t>(blocks), 0.0);
    out.std_error.assign(static_cast<std::size_t>(blocks), 0.0);
    std::vector<double> sums(static_cast<std::size_t>(blocks), 0.0);
    std::vector<double> sq(static_cast<std::size_t>(blocks), 0.0);
    for (const Configuration& c : replicas) {
        if (static_cast<std::int64_t>(c.occupancy.size()) != 2 * n_sites) {
            throw ValidationError("empirical_profile: snapshot size mismatch");
        }
        for (std::int64_t b = 0; b < blocks; ++b) {
            std::int64_t acc = 0;
            for (std::int64_t s = b * block_size; s < (b + 1) * block_size; ++s) {
                acc += c.occupancy[static_cast<std::size_t>(2 * s)];
                acc += c.occupancy[static_cast<std::size_t>(2 * s + 1)];
            }
            double density = static_cast<double>(acc) /
                             static_cast<double>(2 * block_size);
            sums[static_cast<std::size_t>(b)] += density;
            sq[static_cast<std::size_t>(b)] += density * density;
        }
    }
    double rd = static_cast<double>(r_count);
    for (std::int64_t b = 0; b < blocks; ++b) {
        double mean = sums[static_cast<std::size_t>(b)] / rd;
        out.mean[static_cast<std::size_t>(b)] = mean;
        if (r_count > 1) {
            double var = (sq[static_cast<std::size_t>(b)] - rd * mean * mean) / (rd - 1.0);
            out.std_error[static_cast<std::size_t>(b)] =
                std::sqrt(std::max(var, 0.0) / rd);
        }
    }
    return out;
}

double l1_distance(const EmpiricalProfile& profile,
                   const std::function<double(double)>& reference) {
    double acc = 0.0;
    for (std::size_t b = 0; b < profile.mean.size(); ++b) {
        acc += std::abs(profile.mean[b] - reference(profile.x(b)));
    }
    return acc / static_cast<double>(profile.mean.size());
}

CylinderFunction density_cylinder() {
    CylinderFunction psi;
    psi.range_sites = 1;
    psi.eval = [](std::span<const std::int32_t> w) {
        return static_cast<double>(w[0] + w[1]);
    };
    return psi;
}

CylinderFunction jump_rate_cylinder(const measures::JumpRate& g) {
    CylinderFunction psi;
    psi.range_sites = 1;
    psi.eval = [g](std::span<const std::int32_t> w) { return g(w[0]); };
    return psi;
}

double cylinder_expectation(const measures::FugacityTable& table,
                            const CylinderFunction& psi, double rho) {
    if (psi.range_sites < 1) throw ValidationError("cylinder_expectation: empty range");
    std::size_t width = static_cast<std::size_t>(2 * psi.range_sites);
    // per-vertex marginal probabilities truncated so the combined tail
    // stays below 1e-12
    double phi = table.flux(rho);
    double z = table.z(phi);
    const measures::JumpRate& g = table.jump_rate();
    std::vector<double> probs;
    double term = 1.0, cum = 1.0;
    probs.push_back(1.0 / z);
    for (std::int64_t k = 1; cum < z * (1.0 - 1e-12 / static_cast<double>(width)); ++k) {
        term *= phi / g(k);
        cum += term;
        probs.push_back(term / z);
        if (k > 1000000) throw NumericalError("cylinder_expectation: truncation failed");
    }
    std::vector<std::int32_t> window(width, 0);
    double total = 0.0;
    // depth-first product over the window's occupancies
    std::function<void(std::size_t, double)> walk = [&](std::size_t pos, double weight) {
        if (pos == width) {
            total += weight * psi.eval(window);
            return;
        }
        for (std::size_t k = 0; k < probs.size(); ++k) {
            window[pos] = static_cast<std::int32_t>(k);
            walk(pos + 1, weight * probs[k]);
        }
    };
    walk(0, 1.0);
    return total;
}

std::vector<double> theorem1_statistic(std::span<const Configuration> replicas,
                                       std::int64_t n_sites,
                                       const std::function<double(double)>& phi,
                                       const CylinderFunction& psi,
                                       const std::function<double(double)>& rho_of_x,
                                       const measures::FugacityTable& table) {
    if (replicas.empty()) throw ValidationError("theorem1_statistic: no snapshots");
    if (psi.range_sites > n_sites) {
        throw ValidationError("theorem1_statistic: cylinder range exceeds the ring");
    }
    // quadrature of int phi(x) E_{nu_rho(x)}[psi] dx on site midpoints
    double reference = 0.0;
    for (std::int64_t j = 0; j < n_sites; ++j) {
        double x = (static_cast<double>(j) + 0.5) / static_cast<double>(n_sites);
        reference += phi(x) * cylinder_expectation(table, psi, rho_of_x(x));
    }
    reference /= static_cast<double>(n_sites);

    std::size_t width = static_cast<std::size_t>(2 * psi.range_sites);
    std::vector<double> values;
    values.reserve(replicas.size());
    std::vector<std::int32_t> window(width);
    for (const Configuration& c : replicas) {
        if (static_cast<std::int64_t>(c.occupancy.size()) != 2 * n_sites) {
            throw ValidationError("theorem1_statistic: snapshot size mismatch");
        }
        double field = 0.0;
        for (std::int64_t j = 0; j < n_sites; ++j) {
            for (int s = 0; s < psi.range_sites; ++s) {
                std::int64_t site = (j + s) % n_sites;
                window[static_cast<std::size_t>(2 * s)] =
                    c.occupancy[static_cast<std::size_t>(2 * site)];
                window[static_cast<std::size_t>(2 * s + 1)] =
                    c.occupancy[static_cast<std::size_t>(2 * site + 1)];
            }
            field += phi(static_cast<double>(j) / static_cast<double>(n_sites)) *
                     psi.eval(window);
        }
        values.push_back(std::abs(field / static_cast<double>(n_sites) - reference));
    }
    return values;
}

} // namespace zrp::analysis
