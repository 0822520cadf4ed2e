// pde.hpp — solver for d/dt rho = kappa d2/dx2 Phi(rho) on the unit torus:
// pointwise Phi then a 3-point Laplacian (conservative on uniform grids),
// explicit Euler with an auto CFL step or Crank–Nicolson with Newton inner
// iterations. An exact Fourier oracle covers the linear case Phi = id.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zrp/measures.hpp"

namespace zrp::pde {

struct DensityProfile {
    std::vector<double> values;  // values[i] at x = i / values.size()
    double time = 0.0;

    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const {
        return static_cast<double>(i) / static_cast<double>(values.size());
    }
    double mass() const;          // sum rho * dx
    double min_value() const;
    double max_value() const;
};

enum class Scheme { explicit_euler, crank_nicolson };

struct PDEConfig {
    double kappa = 1.0;
    std::size_t grid_size = 256;
    double dt = 0.0;  // 0 -> auto: 0.4 x the CFL bound dx^2 / (2 kappa max Phi')
    Scheme scheme = Scheme::explicit_euler;
};

// Evaluates an expression profile on a grid: constant c or mean + amp*sin(2 pi x).
DensityProfile constant_profile(double value, std::size_t grid_size);
DensityProfile sine_profile(double mean, double amplitude, std::size_t grid_size);

DensityProfile solve_pde(const DensityProfile& rho0, const measures::FugacityTable& table,
                         const PDEConfig& cfg, double t_end);

struct FourierMode {
    int wavenumber = 1;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

// Heat-kernel decay e^{-4 pi^2 k^2 kappa t} per mode; only valid when the
// table's flux is the identity (misuse error otherwise).
DensityProfile exact_linear_solution(const measures::FugacityTable& table, double mean,
                                     std::span<const FourierMode> modes, double kappa,
                                     double t, std::size_t grid_size);

} // namespace zrp::pde
