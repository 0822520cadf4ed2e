// measures.hpp — jump rates and the fugacity machinery for the stationary
// product marginals nu_rho(k) = phi^k / (Z(phi) g(k)!), phi = Phi(rho):
// the normalisation Z, the density-at-fugacity R, the flux Phi = R^{-1},
// samplers, the large-deviations rate function J_rho, and the curvature
// gap M(lambda, rho).
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "zrp/common.hpp"
#include "zrp/configuration.hpp"
#include "zrp/environment.hpp"
#include "zrp/interp.hpp"
#include "zrp/rng.hpp"

namespace zrp::measures {

struct JumpRate {
    std::string name;
    bool slg = false;  // limsup g(k)/k == 0 asserted for this family
    double (*eval)(std::int64_t k) = nullptr;
    double phi_star = std::numeric_limits<double>::infinity();  // radius of Z

    double operator()(std::int64_t k) const { return eval(k); }
};

JumpRate const1_rate();  // g(k) = 1 for k >= 1 (phi_star = 1)
JumpRate linear_rate();  // g(k) = k            (phi_star = inf)
JumpRate jump_rate_by_name(const std::string& name);

// Z(phi) = sum_k phi^k / g(k)!, summed until the geometric tail bound drops
// below 1e-14 of the partial sum. Throws NumericalError for phi >= phi_star.
double partition_function(const JumpRate& g, double phi);

// R(phi) = sum_k k phi^k / (Z(phi) g(k)!), the density at fugacity phi.
double mean_density(const JumpRate& g, double phi);

class FugacityTable {
public:
    static FugacityTable build(const JumpRate& g, double rho_max = 50.0);

    // Lazily built shared tables for the two shipped families.
    static const FugacityTable& shared(const std::string& name);

    const JumpRate& jump_rate() const { return g_; }
    double phi_star() const { return g_.phi_star; }
    double rho_max() const { return rho_max_; }
    double phi_max() const { return phi_max_; }  // Phi(rho_max)

    double z(double phi) const { return partition_function(g_, phi); }
    double r(double phi) const { return mean_density(g_, phi); }
    double z_interp(double phi) const;
    double r_interp(double phi) const;

    // Phi(rho): monotone bisection of R bracketing to 1e-12 plus a Newton
    // polish; |R(flux(rho)) - rho| <= 1e-10 across the table range.
    double flux(double rho) const;
    double flux_derivative(double rho) const;  // Phi'(rho) = 1 / R'(Phi(rho))

    // Interpolated fast path for hot loops; error <= 1e-9 vs flux().
    double flux_interp(double rho) const;
    double flux_derivative_interp(double rho) const;
    void flux_batch(std::span<const double> rho, std::span<double> out) const;

    void write_csv(std::ostream& os) const;  // columns phi, Z, R

private:
    JumpRate g_;
    double rho_max_ = 0.0;
    double phi_max_ = 0.0;
    HermiteTable z_table_, r_table_;           // on a uniform phi grid
    HermiteTable flux_table_, flux_deriv_table_;  // on a uniform rho grid
};

// One draw from the marginal at density rho (inverse-CDF walk).
std::int64_t sample_marginal(const FugacityTable& t, double rho, Rng& rng);

// Product-measure sampler with per-site densities precomputed once, for
// repeated replica draws. Both rows of site j share site_density[j].
class ProfileSampler {
public:
    ProfileSampler(const FugacityTable& t, std::vector<double> site_density);
    Configuration sample(Rng& rng) const;
    const std::vector<double>& site_density() const { return density_; }

private:
    const FugacityTable* table_;
    std::vector<double> density_;
    std::vector<double> site_phi_;
    std::vector<double> site_z_;
};

Configuration sample_product_configuration(
    const env::Environment& e, const std::function<double(std::int64_t)>& site_density,
    const FugacityTable& t, Rng& rng);

// Large-deviations rate function of iid marginals at density rho:
// J_rho(lambda) = sup_theta [theta*lambda - log E e^{theta omega}]. The
// stationarity condition R(e^theta Phi(rho)) = lambda is solved with the
// same bisection/Newton inversion as flux(); lambda beyond the tabulated
// density range yields +infinity.
double rate_function(const FugacityTable& t, double rho, double lambda);

// M(lambda, rho) = 2 kappa { Phi(lambda) - Phi(rho) - (lambda-rho) Phi'(rho) }
double curvature_gap(const FugacityTable& t, double kappa, double lambda, double rho);

// max over the grids of gamma*|F_bound*M(lambda,rho)| - J_rho(lambda);
// a nonpositive value certifies the inequality on the grid.
double proposition4_check(const FugacityTable& t, double kappa, double F_bound,
                          double gamma, std::span<const double> rho_grid,
                          std::span<const double> lambda_grid);

} // namespace zrp::measures
