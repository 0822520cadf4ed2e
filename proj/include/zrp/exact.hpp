// exact.hpp — exact toolkit for tiny closed systems: full enumeration of all
// configurations with a fixed particle number, the sparse generator matrix,
// the canonical stationary measure, relative entropy, the Dirichlet form,
// and transient distributions via uniformization.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrp/environment.hpp"
#include "zrp/measures.hpp"

namespace zrp::dyn {

struct ExactModel {
    std::int64_t n_vertices = 0;
    std::int64_t total_particles = 0;
    std::int64_t n_states = 0;
    std::vector<std::int32_t> states;   // n_states rows of n_vertices occupancies
    // generator in CSR form; off-diagonal entries only, diagonal separate
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int32_t> col;
    std::vector<double> val;
    std::vector<double> diag;

    std::span<const std::int32_t> state(std::int64_t i) const {
        return {states.data() + i * n_vertices, static_cast<std::size_t>(n_vertices)};
    }
    std::int64_t index_of(std::span<const std::int32_t> occupancy) const;

private:
    friend ExactModel build_exact_model(const env::Environment&, const measures::JumpRate&,
                                        std::int64_t, std::int64_t);
    std::vector<std::int64_t> binom_;  // Pascal table for combinadic ranking
    std::int64_t binom(std::int64_t n, std::int64_t k) const;
};

// States are enumerated lexicographically; the guard rejects state spaces
// larger than max_states (default 10^6).
ExactModel build_exact_model(const env::Environment& e, const measures::JumpRate& g,
                             std::int64_t total_particles,
                             std::int64_t max_states = 1'000'000);

// pi(sigma) proportional to prod_x 1 / g(sigma_x)!  (stationary for any
// bistochastic orientation, independent of the fugacity).
std::vector<double> canonical_measure(const ExactModel& model, const measures::JumpRate& g);

// || pi^T Q ||_inf; requires pi normalized to 1 within 1e-9.
double stationarity_residual(const ExactModel& model, std::span<const double> pi);

// H(mu | pi) = sum mu log(mu/pi); +infinity if mu charges a pi-null state.
double relative_entropy(std::span<const double> mu, std::span<const double> pi);

// D(h) = 1/2 sum_sigma pi(sigma) sum_edges g(sigma_x) (sqrt h(sigma^{xy}) - sqrt h(sigma))^2
// with pi the canonical measure.
double dirichlet_form(const ExactModel& model, const measures::JumpRate& g,
                      std::span<const double> h);

// mu_t = mu_0 e^{Qt} by uniformization (Poisson-weighted jump-kernel powers).
std::vector<double> transient_distribution(const ExactModel& model,
                                           std::span<const double> mu0, double t);

} // namespace zrp::dyn
