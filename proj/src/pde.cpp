// pde.cpp — explicit and Crank–Nicolson stepping of the nonlinear heat
// equation; the hot loop runs through the SIMD kernels.

#include "zrp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zrp/kernels.hpp"

namespace zrp::pde {

namespace {

// max Phi' over [lo, hi], used for the CFL bound
double max_flux_derivative(const measures::FugacityTable& table, double lo, double hi) {
    double worst = 0.0;
    const int samples = 64;
    for (int i = 0; i <= samples; ++i) {
        double rho = lo + (hi - lo) * static_cast<double>(i) / samples;
        worst = std::max(worst, table.flux_derivative_interp(rho));
    }
    return worst;
}

// Solves the periodic tridiagonal-plus-corners system (a, b, c constant
// bands would be enough here, but general bands keep Newton simple):
// a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = r[i], cyclically.
std::vector<double> cyclic_tridiagonal_solve(std::vector<double> a, std::vector<double> b,
                                             std::vector<double> c, std::vector<double> r) {
    std::size_t n = b.size();
    if (n < 3) throw ValidationError("cyclic solve: need at least 3 unknowns");
    // Sherman-Morrison: strip the corner entries a[0], c[n-1] into u v^T.
    double alpha = a[0];
    double beta = c[n - 1];
    double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    auto thomas = [&](std::vector<double> rhs) {
        std::vector<double> cp(n), x(n);
        cp[0] = c[0] / bb[0];
        x[0] = rhs[0] / bb[0];
        for (std::size_t i = 1; i < n; ++i) {
            double m = bb[i] - a[i] * cp[i - 1];
            cp[i] = (i + 1 < n ? c[i] : 0.0) / m;
            x[i] = (rhs[i] - a[i] * x[i - 1]) / m;
        }
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
        return x;
    };
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;
    std::vector<double> y = thomas(std::move(r));
    std::vector<double> q = thomas(std::move(u));
    double fact = (y[0] + alpha * y[n - 1] / gamma) /
                  (1.0 + q[0] + alpha * q[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) y[i] -= fact * q[i];
    return y;
}

void explicit_sweep(std::vector<double>& rho, std::vector<double>& phi,
                    const measures::FugacityTable& table, double c) {
    std::size_t m = rho.size();
    table.flux_batch(rho, phi);
    kernels::heat_step(rho.data(), phi.data(), c, rho.data(), m);
}

// One Crank–Nicolson step by Newton iteration on
//   v - rho - (kappa dt / 2 dx^2) (L Phi(v) + L Phi(rho)) = 0.
void crank_nicolson_step(std::vector<double>& rho, const measures::FugacityTable& table,
                         double kappa_dt_over_dx2) {
    std::size_t m = rho.size();
    double half = 0.5 * kappa_dt_over_dx2;
    std::vector<double> phi_old(m), lap_old(m), v(rho), phi(m), resid(m);
    table.flux_batch(rho, phi_old);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t l = (i + m - 1) % m, r = (i + 1) % m;
        lap_old[i] = (phi_old[l] + phi_old[r]) - 2.0 * phi_old[i];
    }
    const int max_newton = 50;
    for (int it = 0;; ++it) {
        if (it == max_newton) {
            throw NumericalError("crank_nicolson: Newton failed to converge");
        }
        table.flux_batch(v, phi);
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t l = (i + m - 1) % m, r = (i + 1) % m;
            double lap = (phi[l] + phi[r]) - 2.0 * phi[i];
            resid[i] = v[i] - rho[i] - half * (lap + lap_old[i]);
            worst = std::max(worst, std::abs(resid[i]));
        }
        if (worst <= 1e-12) break;
        // Jacobian: I - half * L diag(Phi'(v))
        std::vector<double> a(m), b(m), c(m);
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t l = (i + m - 1) % m, r = (i + 1) % m;
            double dl = table.flux_derivative_interp(v[l]);
            double dc = table.flux_derivative_interp(v[i]);
            double dr = table.flux_derivative_interp(v[r]);
            a[i] = -half * dl;
            b[i] = 1.0 + 2.0 * half * dc;
            c[i] = -half * dr;
        }
        std::vector<double> delta = cyclic_tridiagonal_solve(
            std::move(a), std::move(b), std::move(c), resid);
        for (std::size_t i = 0; i < m; ++i) v[i] -= delta[i];
    }
    rho = std::move(v);
}

} // namespace

double DensityProfile::mass() const {
    return kernels::sum(values.data(), values.size()) /
           static_cast<double>(values.size());
}

double DensityProfile::min_value() const {
    double mn, mx;
    kernels::minmax(values.data(), values.size(), &mn, &mx);
    return mn;
}

double DensityProfile::max_value() const {
    double mn, mx;
    kernels::minmax(values.data(), values.size(), &mn, &mx);
    return mx;
}

DensityProfile constant_profile(double value, std::size_t grid_size) {
    DensityProfile p;
    p.values.assign(grid_size, value);
    return p;
}

DensityProfile sine_profile(double mean, double amplitude, std::size_t grid_size) {
    DensityProfile p;
    p.values.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(grid_size);
        p.values[i] = mean + amplitude * std::sin(2.0 * std::numbers::pi * x);
    }
    return p;
}

DensityProfile solve_pde(const DensityProfile& rho0, const measures::FugacityTable& table,
                         const PDEConfig& cfg, double t_end) {
    if (rho0.size() < 3) throw ValidationError("solve_pde: need at least 3 grid points");
    if (cfg.grid_size != 0 && cfg.grid_size != rho0.size()) {
        throw ValidationError("solve_pde: config grid size does not match rho0");
    }
    if (t_end < rho0.time) throw ValidationError("solve_pde: t_end before initial time");
    if (!(cfg.kappa > 0.0)) throw ValidationError("solve_pde: kappa must be > 0");
    double lo = rho0.min_value(), hi = rho0.max_value();
    if (!(lo >= 0.0 && hi <= table.rho_max())) {
        throw ValidationError("solve_pde: initial data outside the table range");
    }
    std::size_t m = rho0.size();
    double dx = 1.0 / static_cast<double>(m);
    double cfl = dx * dx / (2.0 * cfg.kappa * max_flux_derivative(table, lo, hi));
    double dt = cfg.dt;
    if (dt == 0.0) {
        dt = 0.4 * cfl;
    } else if (cfg.scheme == Scheme::explicit_euler && dt > cfl) {
        throw ValidationError("solve_pde: dt violates the CFL bound for the explicit scheme");
    }

    DensityProfile out = rho0;
    std::vector<double> phi(m);
    double remaining = t_end - rho0.time;
    while (remaining > 0.0) {
        double step = std::min(dt, remaining);
        if (cfg.scheme == Scheme::explicit_euler) {
            explicit_sweep(out.values, phi, table, cfg.kappa * step / (dx * dx));
        } else {
            crank_nicolson_step(out.values, table, cfg.kappa * step / (dx * dx));
        }
        remaining -= step;
    }
    out.time = t_end;
    return out;
}

DensityProfile exact_linear_solution(const measures::FugacityTable& table, double mean,
                                     std::span<const FourierMode> modes, double kappa,
                                     double t, std::size_t grid_size) {
    // only meaningful when Phi is the identity
    for (double probe : {0.5, 1.0, 2.0}) {
        if (std::abs(table.flux(probe) - probe) > 1e-9) {
            throw ValidationError("exact_linear_solution: table flux is not the identity");
        }
    }
    DensityProfile p;
    p.time = t;
    p.values.assign(grid_size, mean);
    for (const FourierMode& mode : modes) {
        double k = static_cast<double>(mode.wavenumber);
        double decay = std::exp(-4.0 * std::numbers::pi * std::numbers::pi * k * k * kappa * t);
        for (std::size_t i = 0; i < grid_size; ++i) {
            double x = static_cast<double>(i) / static_cast<double>(grid_size);
            double angle = 2.0 * std::numbers::pi * k * x;
            p.values[i] += decay * (mode.cos_amp * std::cos(angle) +
                                    mode.sin_amp * std::sin(angle));
        }
    }
    return p;
}

} // namespace zrp::pde
