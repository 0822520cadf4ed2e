// kernels.cpp — scalar reference kernels and runtime backend dispatch.

#include "zrp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

namespace zrp::kernels {

namespace {

// One Hermite evaluation; the AVX2 variant mirrors this operation order
// exactly so results are bit-identical across backends.
inline double hermite_one(double x, const double* y, const double* d,
                          double x0, double inv_h, double h, std::size_t m,
                          double xmax) {
    double xc = x < x0 ? x0 : (x > xmax ? xmax : x);
    double u = (xc - x0) * inv_h;
    double fi = std::floor(u);
    double maxi = static_cast<double>(m - 2);
    if (fi > maxi) fi = maxi;
    std::size_t i = static_cast<std::size_t>(fi);
    double t = u - fi;
    double t2 = t * t;
    double t3 = t2 * t;
    double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    double h10 = t3 - 2.0 * t2 + t;
    double h01 = -2.0 * t3 + 3.0 * t2;
    double h11 = t3 - t2;
    return (h00 * y[i] + h10 * (h * d[i])) + (h01 * y[i + 1] + h11 * (h * d[i + 1]));
}

void heat_step_scalar(const double* rho, const double* phi, double c,
                      double* out, std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        out[0] = rho[0];
        return;
    }
    double first = rho[0] + c * ((phi[n - 1] + phi[1]) - 2.0 * phi[0]);
    double last = rho[n - 1] + c * ((phi[n - 2] + phi[0]) - 2.0 * phi[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = rho[i] + c * ((phi[i - 1] + phi[i + 1]) - 2.0 * phi[i]);
    }
    out[0] = first;
    out[n - 1] = last;
}

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double l1_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

void minmax_scalar(const double* x, std::size_t n, double* mn, double* mx) {
    double lo = x[0], hi = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
    }
    *mn = lo;
    *mx = hi;
}

void hermite_eval_scalar(const double* xs, double* ys, std::size_t n,
                         const double* y, const double* d, double x0,
                         double h, std::size_t m) {
    double inv_h = 1.0 / h;
    double xmax = x0 + h * static_cast<double>(m - 1);
    for (std::size_t j = 0; j < n; ++j) {
        ys[j] = hermite_one(xs[j], y, d, x0, inv_h, h, m, xmax);
    }
}

const Backend kScalar{
    "scalar",        heat_step_scalar, sum_scalar,
    l1_diff_scalar,  minmax_scalar,    hermite_eval_scalar,
};

const Backend& pick_backend() {
    const char* req = std::getenv("ZRP_KERNEL");
    if (req != nullptr) {
        std::string name(req);
        if (name == "scalar") return scalar_backend();
        if (name == "avx2" && avx2_available()) return avx2_backend();
    }
    if (avx2_available()) return avx2_backend();
    return scalar_backend();
}

} // namespace

const Backend& scalar_backend() { return kScalar; }

#if !defined(ZRP_HAVE_AVX2)
bool avx2_available() { return false; }
const Backend& avx2_backend() { return kScalar; }
#endif

const Backend& active_backend() {
    static const Backend& chosen = pick_backend();
    return chosen;
}

} // namespace zrp::kernels
