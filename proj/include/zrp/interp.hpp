// interp.hpp — cubic Hermite interpolation on a uniform grid with
// Fritsch–Carlson slope limiting (keeps monotone data monotone).
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zrp {

class HermiteTable {
public:
    HermiteTable() = default;

    // Node derivatives supplied by the caller (then limited), or estimated
    // from the data when omitted.
    static HermiteTable from_values_and_derivs(double x0, double h,
                                               std::vector<double> values,
                                               std::vector<double> derivs);
    static HermiteTable from_values(double x0, double h,
                                    std::vector<double> values);

    double operator()(double x) const;
    void eval_many(std::span<const double> xs, std::span<double> ys) const;

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + h_ * static_cast<double>(values_.size() - 1); }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

private:
    double x0_ = 0.0;
    double h_ = 1.0;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

} // namespace zrp
