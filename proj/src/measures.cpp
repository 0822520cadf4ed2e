// measures.cpp — fugacity series, tabulation, samplers, rate function.

#include "zrp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "zrp/kernels.hpp"

namespace zrp::measures {

namespace {

double g_const1(std::int64_t k) { return k >= 1 ? 1.0 : 0.0; }
double g_linear(std::int64_t k) { return static_cast<double>(k); }

constexpr std::int64_t kSeriesCap = 10'000'000;

// E[omega^r], r = 0..3, of the marginal at fugacity s, in one pass.
struct SeriesMoments {
    double z = 1.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
};

SeriesMoments series_moments(const JumpRate& g, double s) {
    if (s < 0.0) throw ValidationError("fugacity must be nonnegative");
    if (s >= g.phi_star) {
        throw NumericalError("fugacity " + std::to_string(s) +
                             " at or beyond the radius of convergence for " + g.name);
    }
    SeriesMoments out;
    if (s == 0.0) return out;
    double z = 1.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double term = 1.0;
    for (std::int64_t k = 1; k <= kSeriesCap; ++k) {
        double gk = g(k);
        if (gk <= 0.0) throw ValidationError("jump rate must be positive for k >= 1");
        term *= s / gk;
        double kd = static_cast<double>(k);
        z += term;
        a1 += kd * term;
        a2 += kd * kd * term;
        a3 += kd * kd * kd * term;
        double ratio = s / g(k + 1);
        if (ratio < 1.0) {
            // geometric bound on the remaining mass, weighted for the k^3 sum
            double tail = term * ratio / (1.0 - ratio);
            double kd1 = kd + 1.0;
            if (term <= 1e-16 * z && tail * kd1 * kd1 * kd1 <= 1e-15 * z) break;
        }
        if (k == kSeriesCap) {
            throw NumericalError("fugacity series did not converge for " + g.name);
        }
    }
    out.z = z;
    out.m1 = a1 / z;
    out.m2 = a2 / z;
    out.m3 = a3 / z;
    return out;
}

double r_prime(const JumpRate& g, double s) {
    if (s == 0.0) return 1.0 / g(1);
    SeriesMoments m = series_moments(g, s);
    return (m.m2 - m.m1 * m.m1) / s;
}

double r_second(const JumpRate& g, double s) {
    if (s == 0.0) return 2.0 * (2.0 / (g(1) * g(2)) - 1.0 / (g(1) * g(1)));
    SeriesMoments m = series_moments(g, s);
    double var = m.m2 - m.m1 * m.m1;
    double mu3 = m.m3 - 3.0 * m.m1 * m.m2 + 2.0 * m.m1 * m.m1 * m.m1;
    return (mu3 - var) / (s * s);
}

// Solves R(phi) = rho on [0, phi_star) by bisection to 1e-12 bracketing
// width followed by Newton polish steps on the direct series.
double invert_density_direct(const JumpRate& g, double rho, double hi_hint) {
    if (rho == 0.0) return 0.0;
    double lo = 0.0;
    double hi = hi_hint;
    if (!(hi > 0.0)) hi = 1.0;
    if (std::isfinite(g.phi_star)) hi = std::min(hi, g.phi_star * 0.5);
    for (int guard = 0; mean_density(g, hi) < rho; ++guard) {
        if (guard > 20000) throw NumericalError("density inversion: bracket search failed");
        hi = std::isfinite(g.phi_star) ? hi + 0.5 * (g.phi_star - hi) : hi * 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (mean_density(g, mid) < rho ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        double rp = r_prime(g, x);
        if (!(rp > 0.0)) break;
        double nx = x - (mean_density(g, x) - rho) / rp;
        if (nx > lo && nx < hi) x = nx;
    }
    return x;
}

} // namespace

JumpRate const1_rate() { return JumpRate{"const1", true, &g_const1, 1.0}; }

JumpRate linear_rate() {
    return JumpRate{"linear", false, &g_linear,
                    std::numeric_limits<double>::infinity()};
}

JumpRate jump_rate_by_name(const std::string& name) {
    if (name == "const1") return const1_rate();
    if (name == "linear") return linear_rate();
    throw ValidationError("unknown jump rate '" + name + "' (expected const1 or linear)");
}

double partition_function(const JumpRate& g, double phi) {
    return series_moments(g, phi).z;
}

double mean_density(const JumpRate& g, double phi) {
    return series_moments(g, phi).m1;
}

FugacityTable FugacityTable::build(const JumpRate& g, double rho_max) {
    if (!(rho_max > 0.0)) throw ValidationError("FugacityTable: rho_max must be > 0");
    FugacityTable t;
    t.g_ = g;
    t.rho_max_ = rho_max;
    t.phi_max_ = invert_density_direct(g, rho_max, std::isfinite(g.phi_star)
                                                       ? 0.5 * g.phi_star
                                                       : rho_max);

    // phi-grid tables for Z and R with exact node derivatives:
    // Z'(s) = Z R / s, R'(s) = Var(omega)/s.
    const std::size_t mp = 16385;
    const double hp = t.phi_max_ / static_cast<double>(mp - 1);
    std::vector<double> zv(mp), zd(mp), rv(mp), rd(mp);
    for (std::size_t i = 0; i < mp; ++i) {
        double s = hp * static_cast<double>(i);
        SeriesMoments m = series_moments(g, s);
        zv[i] = m.z;
        rv[i] = m.m1;
        if (s == 0.0) {
            zd[i] = 1.0 / g(1);
            rd[i] = 1.0 / g(1);
        } else {
            zd[i] = m.z * m.m1 / s;
            rd[i] = (m.m2 - m.m1 * m.m1) / s;
        }
    }
    t.z_table_ = HermiteTable::from_values_and_derivs(0.0, hp, std::move(zv), std::move(zd));
    t.r_table_ = HermiteTable::from_values_and_derivs(0.0, hp, rv, rd);

    // rho-grid tables for Phi and Phi'. Nodes are located with a cheap
    // bisection on the R interpolant, then polished on the direct series.
    const std::size_t mr = 8193;
    const double hr = rho_max / static_cast<double>(mr - 1);
    std::vector<double> fv(mr), fd(mr), fdd(mr);
    double prev = 0.0;
    for (std::size_t i = 0; i < mr; ++i) {
        double rho = hr * static_cast<double>(i);
        double phi;
        if (i == 0) {
            phi = 0.0;
        } else {
            double lo = prev, hi = t.phi_max_;
            for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                double mid = 0.5 * (lo + hi);
                (t.r_table_(mid) < rho ? lo : hi) = mid;
            }
            phi = 0.5 * (lo + hi);
            for (int it = 0; it < 2; ++it) {
                double rp = r_prime(g, phi);
                if (!(rp > 0.0)) break;
                phi -= (mean_density(g, phi) - rho) / rp;
                phi = std::clamp(phi, 0.0, t.phi_max_);
            }
        }
        fv[i] = phi;
        double rp = r_prime(g, phi);
        double rs = r_second(g, phi);
        fd[i] = 1.0 / rp;
        fdd[i] = -rs / (rp * rp * rp);
        prev = phi;
    }
    std::vector<double> fd_copy = fd;
    t.flux_table_ = HermiteTable::from_values_and_derivs(0.0, hr, std::move(fv), std::move(fd));
    t.flux_deriv_table_ =
        HermiteTable::from_values_and_derivs(0.0, hr, std::move(fd_copy), std::move(fdd));
    return t;
}

const FugacityTable& FugacityTable::shared(const std::string& name) {
    if (name == "const1") {
        static const FugacityTable t = build(const1_rate());
        return t;
    }
    if (name == "linear") {
        static const FugacityTable t = build(linear_rate());
        return t;
    }
    throw ValidationError("unknown jump rate '" + name + "'");
}

double FugacityTable::z_interp(double phi) const {
    if (!(phi >= 0.0 && phi <= phi_max_)) {
        throw ValidationError("z_interp: fugacity outside tabulated range");
    }
    return z_table_(phi);
}

double FugacityTable::r_interp(double phi) const {
    if (!(phi >= 0.0 && phi <= phi_max_)) {
        throw ValidationError("r_interp: fugacity outside tabulated range");
    }
    return r_table_(phi);
}

double FugacityTable::flux(double rho) const {
    if (!(rho >= 0.0 && rho <= rho_max_)) {
        throw ValidationError("flux: density " + std::to_string(rho) +
                              " outside tabulated range [0, " +
                              std::to_string(rho_max_) + "]");
    }
    if (rho == 0.0) return 0.0;
    return invert_density_direct(g_, rho, phi_max_);
}

double FugacityTable::flux_derivative(double rho) const {
    if (!(rho >= 0.0 && rho <= rho_max_)) {
        throw ValidationError("flux_derivative: density outside tabulated range");
    }
    return 1.0 / r_prime(g_, flux(rho));
}

double FugacityTable::flux_interp(double rho) const {
    if (!(rho >= 0.0 && rho <= rho_max_)) {
        throw ValidationError("flux_interp: density outside tabulated range");
    }
    return flux_table_(rho);
}

double FugacityTable::flux_derivative_interp(double rho) const {
    if (!(rho >= 0.0 && rho <= rho_max_)) {
        throw ValidationError("flux_derivative_interp: density outside tabulated range");
    }
    return flux_deriv_table_(rho);
}

void FugacityTable::flux_batch(std::span<const double> rho, std::span<double> out) const {
    if (rho.size() != out.size()) throw ValidationError("flux_batch: size mismatch");
    flux_table_.eval_many(rho, out);
}

void FugacityTable::write_csv(std::ostream& os) const {
    os << "phi,Z,R\n";
    os << std::setprecision(17);
    const std::size_t rows = 2049;
    for (std::size_t i = 0; i < rows; ++i) {
        double phi = phi_max_ * static_cast<double>(i) / static_cast<double>(rows - 1);
        SeriesMoments m = series_moments(g_, phi);
        os << phi << ',' << m.z << ',' << m.m1 << '\n';
    }
}

std::int64_t sample_marginal(const FugacityTable& t, double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho <= t.rho_max())) {
        throw ValidationError("sample_marginal: density outside tabulated range");
    }
    if (rho == 0.0) return 0;
    double phi = t.flux(rho);
    double z = t.z(phi);
    const JumpRate& g = t.jump_rate();
    double u = rng.uniform01() * z;
    double term = 1.0, cum = 1.0;
    std::int64_t k = 0;
    while (u >= cum) {
        ++k;
        term *= phi / g(k);
        cum += term;
        if (k > kSeriesCap) throw NumericalError("sample_marginal: walk did not terminate");
    }
    return k;
}

ProfileSampler::ProfileSampler(const FugacityTable& t, std::vector<double> site_density)
    : table_(&t), density_(std::move(site_density)) {
    site_phi_.resize(density_.size());
    site_z_.resize(density_.size());
    for (std::size_t j = 0; j < density_.size(); ++j) {
        if (!(density_[j] >= 0.0 && density_[j] <= t.rho_max())) {
            throw ValidationError("ProfileSampler: site density outside tabulated range");
        }
        site_phi_[j] = t.flux_interp(density_[j]);
        site_z_[j] = site_phi_[j] == 0.0 ? 1.0 : t.z_interp(site_phi_[j]);
    }
}

Configuration ProfileSampler::sample(Rng& rng) const {
    std::int64_t n = static_cast<std::int64_t>(density_.size());
    Configuration c = Configuration::zeros(2 * n);
    const JumpRate& g = table_->jump_rate();
    for (std::int64_t j = 0; j < n; ++j) {
        double phi = site_phi_[static_cast<std::size_t>(j)];
        double z = site_z_[static_cast<std::size_t>(j)];
        for (int row = 0; row < 2; ++row) {
            std::int64_t k = 0;
            if (phi > 0.0) {
                double u = rng.uniform01() * z;
                double term = 1.0, cum = 1.0;
                while (u >= cum) {
                    ++k;
                    term *= phi / g(k);
                    cum += term;
                    if (k > kSeriesCap) {
                        throw NumericalError("ProfileSampler: walk did not terminate");
                    }
                }
            }
            c.occupancy[static_cast<std::size_t>(2 * j + row)] = static_cast<std::int32_t>(k);
            c.total += k;
        }
    }
    return c;
}

Configuration sample_product_configuration(
    const env::Environment& e, const std::function<double(std::int64_t)>& site_density,
    const FugacityTable& t, Rng& rng) {
    std::vector<double> density(static_cast<std::size_t>(e.n));
    for (std::int64_t j = 0; j < e.n; ++j) {
        density[static_cast<std::size_t>(j)] = site_density(j);
    }
    return ProfileSampler(t, std::move(density)).sample(rng);
}

double rate_function(const FugacityTable& t, double rho, double lambda) {
    if (!(rho > 0.0 && rho <= t.rho_max())) {
        throw ValidationError("rate_function: rho must lie in (0, rho_max]");
    }
    if (lambda < 0.0) throw ValidationError("rate_function: lambda must be >= 0");
    if (lambda > t.rho_max()) return std::numeric_limits<double>::infinity();
    double phi = t.flux(rho);
    if (lambda == 0.0) return std::log(t.z(phi));
    double s = t.flux(lambda);
    double value = lambda * std::log(s / phi) - (std::log(t.z(s)) - std::log(t.z(phi)));
    return std::max(value, 0.0);
}

double curvature_gap(const FugacityTable& t, double kappa, double lambda, double rho) {
    double bregman = t.flux(lambda) - t.flux(rho) - (lambda - rho) * t.flux_derivative(rho);
    return 2.0 * kappa * bregman;
}

double proposition4_check(const FugacityTable& t, double kappa, double F_bound,
                          double gamma, std::span<const double> rho_grid,
                          std::span<const double> lambda_grid) {
    if (!(gamma > 0.0)) throw ValidationError("proposition4_check: gamma must be > 0");
    struct Point {
        double phi, logz, flux_deriv;
    };
    std::vector<Point> rhos(rho_grid.size());
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        double phi = t.flux(rho_grid[i]);
        rhos[i] = {phi, std::log(t.z(phi)), 1.0 / r_prime(t.jump_rate(), phi)};
    }
    std::vector<Point> lambdas(lambda_grid.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        double phi = t.flux(lambda_grid[i]);
        lambdas[i] = {phi, std::log(t.z(phi)), 0.0};
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < rho_grid.size(); ++a) {
        double rho = rho_grid[a];
        for (std::size_t b = 0; b < lambda_grid.size(); ++b) {
            double lambda = lambda_grid[b];
            double bregman = lambdas[b].phi - rhos[a].phi -
                             (lambda - rho) * rhos[a].flux_deriv;
            double m = 2.0 * kappa * bregman;
            double j;
            if (lambda == 0.0 || lambdas[b].phi == 0.0) {
                j = rhos[a].logz;
            } else {
                j = lambda * (std::log(lambdas[b].phi) - std::log(rhos[a].phi)) -
                    (lambdas[b].logz - rhos[a].logz);
            }
            j = std::max(j, 0.0);
            worst = std::max(worst, gamma * std::abs(F_bound * m) - j);
        }
    }
    return worst;
}

} // namespace zrp::measures
