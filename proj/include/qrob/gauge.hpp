#pragma once

#include <vector>

namespace qrob {

/// Weight function on the real line used for moment conditions and weighted
/// sup-metrics. Four families:
///
///   abs_pow(p)      t -> |t|^p
///   phi_p(p)        t -> |t| for |t| <= 1, |t|^p otherwise
///   max_one_pow(p)  t -> max{1, |t|^p}
///   u_shaped_table  piecewise linear from (breakpoint, value) pairs,
///                   constant beyond the table ends
///
/// Only the last two are u-shaped (>= 1 everywhere, non-increasing left of
/// zero, non-decreasing right of zero); the first two are gauges that vanish
/// at the origin. growth_order() is the polynomial tail exponent, used to
/// decide when an integral against a heavy-tailed law is infinite.
class GaugeFunction {
public:
    static GaugeFunction abs_pow(double p);
    static GaugeFunction phi_p(double p);
    static GaugeFunction max_one_pow(double p);
    static GaugeFunction u_shaped_table(std::vector<double> breakpoints,
                                        std::vector<double> values);

    double operator()(double t) const;
    double growth_order() const noexcept { return growth_; }
    bool is_u_shaped() const noexcept { return u_shaped_; }

    enum class Kind { AbsPow, PhiP, MaxOnePow, UShapedTable };
    Kind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return p_; }

private:
    GaugeFunction(Kind kind, double p) : kind_(kind), p_(p) {}

    Kind kind_;
    double p_ = 0.0;
    std::vector<double> xs_;
    std::vector<double> vs_;
    double growth_ = 0.0;
    bool u_shaped_ = false;
};

} // namespace qrob
