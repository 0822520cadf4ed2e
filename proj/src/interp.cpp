// interp.cpp — Hermite table construction with Fritsch–Carlson limiting.

#include "zrp/interp.hpp"

#include <algorithm>
#include <cmath>

#include "zrp/common.hpp"
#include "zrp/kernels.hpp"

namespace zrp {

namespace {

// Limit node slopes so the interpolant cannot overshoot monotone data:
// zero the slope at local extrema of the data, clamp |d| <= 3|delta|.
void fritsch_carlson_limit(const std::vector<double>& y, double h,
                           std::vector<double>& d) {
    std::size_t m = y.size();
    if (m < 2) return;
    std::vector<double> delta(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) delta[i] = (y[i + 1] - y[i]) / h;
    for (std::size_t i = 0; i < m; ++i) {
        double dl = i > 0 ? delta[i - 1] : delta[0];
        double dr = i + 1 < m ? delta[i] : delta[m - 2];
        if (i > 0 && i + 1 < m && dl * dr <= 0.0) {
            d[i] = 0.0;
            continue;
        }
        double bound = 3.0 * std::min(std::abs(dl), std::abs(dr));
        if (i == 0) bound = 3.0 * std::abs(dr);
        if (i + 1 == m) bound = 3.0 * std::abs(dl);
        d[i] = std::clamp(d[i], -bound, bound);
    }
}

} // namespace

HermiteTable HermiteTable::from_values_and_derivs(double x0, double h,
                                                  std::vector<double> values,
                                                  std::vector<double> derivs) {
    if (values.size() < 2 || values.size() != derivs.size() || h <= 0.0) {
        throw ValidationError("HermiteTable: need >= 2 nodes, matching derivs, h > 0");
    }
    fritsch_carlson_limit(values, h, derivs);
    HermiteTable t;
    t.x0_ = x0;
    t.h_ = h;
    t.values_ = std::move(values);
    t.derivs_ = std::move(derivs);
    return t;
}

HermiteTable HermiteTable::from_values(double x0, double h,
                                       std::vector<double> values) {
    if (values.size() < 2 || h <= 0.0) {
        throw ValidationError("HermiteTable: need >= 2 nodes and h > 0");
    }
    std::size_t m = values.size();
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            d[i] = m > 2 ? (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
                         : (values[1] - values[0]) / h;
        } else if (i + 1 == m) {
            d[i] = m > 2 ? (3.0 * values[m - 1] - 4.0 * values[m - 2] + values[m - 3]) / (2.0 * h)
                         : (values[1] - values[0]) / h;
        } else {
            d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
        }
    }
    return from_values_and_derivs(x0, h, std::move(values), std::move(d));
}

double HermiteTable::operator()(double x) const {
    double y;
    kernels::hermite_eval(&x, &y, 1, values_.data(), derivs_.data(), x0_, h_,
                          values_.size());
    return y;
}

void HermiteTable::eval_many(std::span<const double> xs, std::span<double> ys) const {
    kernels::hermite_eval(xs.data(), ys.data(), xs.size(), values_.data(),
                          derivs_.data(), x0_, h_, values_.size());
}

} // namespace zrp
