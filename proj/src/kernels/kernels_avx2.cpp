// kernels_avx2.cpp — AVX2 variants of the data-parallel kernels. This
// translation unit is compiled with -mavx2 and only entered after a runtime
// CPU check. Maps use plain mul/add (no FMA) in the same order as the scalar
// reference, so they are bit-identical; reductions use four lanes and differ
// from the scalar path by summation order only.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "zrp/kernels.hpp"

namespace zrp::kernels {

namespace {

void heat_step_avx2(const double* rho, const double* phi, double c,
                    double* out, std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        out[0] = rho[0];
        return;
    }
    double first = rho[0] + c * ((phi[n - 1] + phi[1]) - 2.0 * phi[0]);
    double last = rho[n - 1] + c * ((phi[n - 2] + phi[0]) - 2.0 * phi[n - 1]);
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        __m256d pl = _mm256_loadu_pd(phi + i - 1);
        __m256d pr = _mm256_loadu_pd(phi + i + 1);
        __m256d pc = _mm256_loadu_pd(phi + i);
        __m256d rv = _mm256_loadu_pd(rho + i);
        __m256d lap = _mm256_sub_pd(_mm256_add_pd(pl, pr), _mm256_mul_pd(two, pc));
        _mm256_storeu_pd(out + i, _mm256_add_pd(rv, _mm256_mul_pd(cv, lap)));
    }
    for (; i + 1 < n; ++i) {
        out[i] = rho[i] + c * ((phi[i - 1] + phi[i + 1]) - 2.0 * phi[i]);
    }
    out[0] = first;
    out[n - 1] = last;
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double l1_diff_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(signmask, diff));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

void minmax_avx2(const double* x, std::size_t n, double* mn, double* mx) {
    double lo = x[0], hi = x[0];
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vlo = _mm256_loadu_pd(x);
        __m256d vhi = vlo;
        for (i = 4; i + 4 <= n; i += 4) {
            __m256d v = _mm256_loadu_pd(x + i);
            vlo = _mm256_min_pd(vlo, v);
            vhi = _mm256_max_pd(vhi, v);
        }
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, vlo);
        lo = std::min(std::min(tmp[0], tmp[1]), std::min(tmp[2], tmp[3]));
        _mm256_store_pd(tmp, vhi);
        hi = std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
    }
    for (; i < n; ++i) {
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
    }
    *mn = lo;
    *mx = hi;
}

void hermite_eval_avx2(const double* xs, double* ys, std::size_t n,
                       const double* y, const double* d, double x0,
                       double h, std::size_t m) {
    const double inv_h = 1.0 / h;
    const double xmax = x0 + h * static_cast<double>(m - 1);
    const __m256d x0v = _mm256_set1_pd(x0);
    const __m256d xmaxv = _mm256_set1_pd(xmax);
    const __m256d invhv = _mm256_set1_pd(inv_h);
    const __m256d hv = _mm256_set1_pd(h);
    const __m256d maxiv = _mm256_set1_pd(static_cast<double>(m - 2));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d three = _mm256_set1_pd(3.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d x = _mm256_loadu_pd(xs + j);
        x = _mm256_min_pd(_mm256_max_pd(x, x0v), xmaxv);
        __m256d u = _mm256_mul_pd(_mm256_sub_pd(x, x0v), invhv);
        __m256d fi = _mm256_floor_pd(u);
        fi = _mm256_min_pd(fi, maxiv);
        __m128i idx = _mm256_cvttpd_epi32(fi);
        __m128i idx1 = _mm_add_epi32(idx, _mm_set1_epi32(1));
        __m256d t = _mm256_sub_pd(u, fi);
        __m256d t2 = _mm256_mul_pd(t, t);
        __m256d t3 = _mm256_mul_pd(t2, t);
        __m256d h00 = _mm256_add_pd(
            _mm256_sub_pd(_mm256_mul_pd(two, t3), _mm256_mul_pd(three, t2)), one);
        __m256d h10 = _mm256_add_pd(_mm256_sub_pd(t3, _mm256_mul_pd(two, t2)), t);
        __m256d h01 = _mm256_add_pd(_mm256_sub_pd(_mm256_setzero_pd(),
                                                  _mm256_mul_pd(two, t3)),
                                    _mm256_mul_pd(three, t2));
        __m256d h11 = _mm256_sub_pd(t3, t2);
        __m256d y0 = _mm256_i32gather_pd(y, idx, 8);
        __m256d y1 = _mm256_i32gather_pd(y, idx1, 8);
        __m256d d0 = _mm256_i32gather_pd(d, idx, 8);
        __m256d d1 = _mm256_i32gather_pd(d, idx1, 8);
        __m256d left = _mm256_add_pd(_mm256_mul_pd(h00, y0),
                                     _mm256_mul_pd(h10, _mm256_mul_pd(hv, d0)));
        __m256d right = _mm256_add_pd(_mm256_mul_pd(h01, y1),
                                      _mm256_mul_pd(h11, _mm256_mul_pd(hv, d1)));
        _mm256_storeu_pd(ys + j, _mm256_add_pd(left, right));
    }
    for (; j < n; ++j) {
        double xc = xs[j] < x0 ? x0 : (xs[j] > xmax ? xmax : xs[j]);
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
        ys[j] = (h00 * y[i] + h10 * (h * d[i])) + (h01 * y[i + 1] + h11 * (h * d[i + 1]));
    }
}

const Backend kAvx2{
    "avx2",        heat_step_avx2, sum_avx2,
    l1_diff_avx2,  minmax_avx2,    hermite_eval_avx2,
};

} // namespace

bool avx2_available() {
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
}

const Backend& avx2_backend() { return kAvx2; }

} // namespace zrp::kernels

#endif // x86_64
