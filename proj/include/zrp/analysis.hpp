// analysis.hpp — tile and block observables: windowed averages, the
// one-block statistics, the tile-size defect C(l), the F and G evaluators,
// empirical block profiles, and the density-field comparison statistic.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/environment.hpp"
#include "zrp/measures.hpp"
#include "zrp/pde.hpp"

namespace zrp::analysis {

// Windowed tile averages over the 2l+1 tiles around each tile j (cyclic):
//   omega_hat[j]  : particle sum over tile j
//   omega_l[j]    : window particle sum / window vertex count
//   omega_bar_l[j]: window particle sum / (2l+1)
//   g_l[j]        : window sum of centre-pair jump rates / (4l+2)
struct TileAverages {
    std::int64_t l = 0;
    std::vector<double> omega_hat;
    std::vector<double> omega_l;
    std::vector<double> omega_bar_l;
    std::vector<double> g_l;
};

TileAverages tile_averages(const Configuration& config, const env::TileDecomposition& d,
                           const measures::JumpRate& g, std::int64_t l);

// (1/T_N) sum_j |g_l[j] - Phi(omega_l[j])|
double one_block_statistic(const Configuration& config, const env::TileDecomposition& d,
                           const measures::FugacityTable& table, std::int64_t l);

// (1/T_N) sum_j |2 g_l[j] - 2 Phi(omega_l[j])|, the per-pair normalisation.
double section5_statistic(const Configuration& config, const env::TileDecomposition& d,
                          const measures::FugacityTable& table, std::int64_t l);

// (1/T_N) sum_j |1/kappa_N - (4l+2) / sum_{|m-j|<=l} N_m|
double c_of_l(const env::TileDecomposition& d, std::int64_t l);

// F(t, x_i) = kappa * d2/dx2  Phi(rho(t,x_i)) / Phi(rho(t,x_i)) on the grid.
std::vector<double> eval_F(const pde::DensityProfile& rho,
                           const measures::FugacityTable& table, double kappa);

// G = 2 kappa gamma F { Phi(lambda) - Phi(rho) - (lambda-rho) Phi'(rho) }
double eval_G(const measures::FugacityTable& table, double kappa, double gamma,
              double F_value, double rho_ref, double lambda);

struct EmpiricalProfile {
    std::int64_t n_sites = 0;
    std::int64_t block_size = 0;
    std::vector<double> mean;        // per-vertex density per block
    std::vector<double> std_error;   // across replicas

    double x(std::size_t block) const {
        return (static_cast<double>(block) + 0.5) * static_cast<double>(block_size) /
               static_cast<double>(n_sites);
    }
};

// Block density (sum of occupancies over b sites and both rows) / (2b),
// averaged over replicas. b must divide the site count.
EmpiricalProfile empirical_profile(std::span<const Configuration> replicas,
                                   std::int64_t n_sites, std::int64_t block_size);

// integral |empirical - reference| dx over the block midpoints
double l1_distance(const EmpiricalProfile& profile,
                   const std::function<double(double)>& reference);

// Finite-range cylinder function of the occupancies around a site: the
// window covers `range_sites` consecutive sites, both rows, ordered
// (site, +1), (site, -1), (site+1, +1), ...
struct CylinderFunction {
    int range_sites = 1;
    std::function<double(std::span<const std::int32_t>)> eval;
};

CylinderFunction density_cylinder();         // omega_{0,1} + omega_{0,-1}
CylinderFunction jump_rate_cylinder(const measures::JumpRate& g);  // g(omega_{0,1})

// E_{nu_rho}[psi] by truncated summation over the product marginals
// (per-vertex tails below 1e-12).
double cylinder_expectation(const measures::FugacityTable& table,
                            const CylinderFunction& psi, double rho);

// | (1/N) sum_j phi(j/N) psi(tau_j omega) - int phi(x) E_{nu_rho(x)}[psi] dx |
// per replica; returns the replica values.
std::vector<double> theorem1_statistic(std::span<const Configuration> replicas,
                                       std::int64_t n_sites,
                                       const std::function<double(double)>& phi,
                                       const CylinderFunction& psi,
                                       const std::function<double(double)>& rho_of_x,
                                       const measures::FugacityTable& table);

} // namespace zrp::analysis
