// kernels.hpp — data-parallel inner loops used by the PDE solver and the
// statistics code: a scalar reference implementation plus an AVX2 variant
// selected at runtime. The two are equivalence-tested against each other;
// elementwise maps are written so both produce bit-identical results
// (identical operation order, no FMA contraction), reductions may differ
// by reassociation only.
#pragma once

#include <cstddef>

namespace zrp::kernels {

struct Backend {
    const char* name;

    // out[i] = rho[i] + c * ((phi[i-1] + phi[i+1]) - 2*phi[i]), periodic in i.
    // out may not alias phi; out == rho is allowed.
    void (*heat_step)(const double* rho, const double* phi, double c,
                      double* out, std::size_t n);

    double (*sum)(const double* x, std::size_t n);

    // sum_i |a[i] - b[i]|
    double (*l1_diff)(const double* a, const double* b, std::size_t n);

    void (*minmax)(const double* x, std::size_t n, double* mn, double* mx);

    // Cubic Hermite table evaluation on a uniform grid of m nodes starting
    // at x0 with spacing h: node values y[], node derivatives d[].
    // Inputs are clamped to [x0, x0 + (m-1)h].
    void (*hermite_eval)(const double* xs, double* ys, std::size_t n,
                         const double* y, const double* d, double x0,
                         double h, std::size_t m);
};

const Backend& scalar_backend();
bool avx2_available();
const Backend& avx2_backend();  // valid only if avx2_available()

// Best supported backend, overridable via ZRP_KERNEL=scalar|avx2.
const Backend& active_backend();

inline void heat_step(const double* rho, const double* phi, double c,
                      double* out, std::size_t n) {
    active_backend().heat_step(rho, phi, c, out, n);
}

inline double sum(const double* x, std::size_t n) {
    return active_backend().sum(x, n);
}

inline double l1_diff(const double* a, const double* b, std::size_t n) {
    return active_backend().l1_diff(a, b, n);
}

inline void minmax(const double* x, std::size_t n, double* mn, double* mx) {
    active_backend().minmax(x, n, mn, mx);
}

inline void hermite_eval(const double* xs, double* ys, std::size_t n,
                         const double* y, const double* d, double x0,
                         double h, std::size_t m) {
    active_backend().hermite_eval(xs, ys, n, y, d, x0, h, m);
}

} // namespace zrp::kernels
