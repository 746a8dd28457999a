#include "qrob/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrob {

GaugeFunction GaugeFunction::abs_pow(double p) {
    if (!(p >= 0.0)) throw std::invalid_argument("abs_pow: need p >= 0");
    GaugeFunction g(Kind::AbsPow, p);
    g.growth_ = p;
    g.u_shaped_ = (p == 0.0); // |t|^0 == 1
    return g;
}

GaugeFunction GaugeFunction::phi_p(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("phi_p: need p >= 1");
    GaugeFunction g(Kind::PhiP, p);
    g.growth_ = p;
    g.u_shaped_ = false; // vanishes at the origin
    return g;
}

GaugeFunction GaugeFunction::max_one_pow(double p) {
    if (!(p >= 0.0)) throw std::invalid_argument("max_one_pow: need p >= 0");
    GaugeFunction g(Kind::MaxOnePow, p);
    g.growth_ = p;
    g.u_shaped_ = true;
    return g;
}

GaugeFunction GaugeFunction::u_shaped_table(std::vector<double> breakpoints,
                                            std::vector<double> values) {
    if (breakpoints.size() != values.size() || breakpoints.empty())
        throw std::invalid_argument("u_shaped_table: need matching non-empty vectors");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("u_shaped_table: breakpoints must be strictly increasing");
    for (double v : values)
        if (!(v >= 1.0) || !std::isfinite(v))
            throw std::invalid_argument("u_shaped_table: values must be finite and >= 1");
    // Monotone down left of zero, up right of zero; a segment spanning zero
    // must be flat, since a non-constant line cannot turn at the origin.
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double x0 = breakpoints[i], x1 = breakpoints[i + 1];
        const double v0 = values[i], v1 = values[i + 1];
        if (x1 <= 0.0) {
            if (v1 > v0) throw std::invalid_argument("u_shaped_table: must be non-increasing left of 0");
        } else if (x0 >= 0.0) {
            if (v1 < v0) throw std::invalid_argument("u_shaped_table: must be non-decreasing right of 0");
        } else if (v0 != v1) {
            throw std::invalid_argument("u_shaped_table: segment spanning 0 must be flat");
        }
    }
    GaugeFunction g(Kind::UShapedTable, 0.0);
    g.xs_ = std::move(breakpoints);
    g.vs_ = std::move(values);
    g.growth_ = 0.0; // bounded by the end values
    g.u_shaped_ = true;
    return g;
}

double GaugeFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::AbsPow:
            return (p_ == 0.0) ? 1.0 : std::pow(std::abs(t), p_);
        case Kind::PhiP: {
            const double a = std::abs(t);
            return a <= 1.0 ? a : std::pow(a, p_);
        }
        case Kind::MaxOnePow:
            return std::max(1.0, (p_ == 0.0) ? 1.0 : std::pow(std::abs(t), p_));
        case Kind::UShapedTable: {
            if (t <= xs_.front()) return vs_.front();
            if (t >= xs_.back()) return vs_.back();
            const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
            const double w = (t - xs_[i]) / (xs_[i + 1] - xs_[i]);
            return vs_[i] + w * (vs_[i + 1] - vs_[i]);
        }
    }
    return 0.0; // unreachable
}

} // namespace qrob
