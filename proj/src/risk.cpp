#include "qrob/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qrob/numerics.hpp"

namespace qrob {

double utility_value(const Utility& u, double t) {
    if (std::holds_alternative<PiecewiseLinearUtility>(u)) {
        const auto& pl = std::get<PiecewiseLinearUtility>(u);
        return pl.gamma1 * std::max(t, 0.0) - pl.gamma2 * std::max(-t, 0.0);
    }
    return t < 1.0 ? t - 0.5 * t * t : 0.5;
}

double loss_value(const Loss& l, double x) {
    if (std::holds_alternative<DepositInsuranceLoss>(l)) return std::max(x, 0.0);
    const double p = std::get<PthPowerLoss>(l).p;
    return x > 0.0 ? std::pow(x, p) / p : 0.0;
}

double loss_derivative_right(const Loss& l, double x) {
    if (std::holds_alternative<DepositInsuranceLoss>(l)) return x >= 0.0 ? 1.0 : 0.0;
    const double p = std::get<PthPowerLoss>(l).p;
    return x > 0.0 ? std::pow(x, p - 1.0) : 0.0;
}

// ---------------------------------------------------------------------------
// spec construction

RiskFunctionalSpec RiskFunctionalSpec::expectation() {
    return {Tag::Expectation, 0.0, {}, {}, 0.0, 1.0};
}

RiskFunctionalSpec RiskFunctionalSpec::cvar(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("cvar: tau must lie in (0,1)");
    RiskFunctionalSpec s;
    s.tag = Tag::CVaR;
    s.tau = tau;
    return s;
}

RiskFunctionalSpec RiskFunctionalSpec::upper_semideviation() {
    RiskFunctionalSpec s;
    s.tag = Tag::UpperSemiDeviation;
    return s;
}

RiskFunctionalSpec RiskFunctionalSpec::oce(Utility utility) {
    if (std::holds_alternative<PiecewiseLinearUtility>(utility)) {
        const auto& pl = std::get<PiecewiseLinearUtility>(utility);
        if (!(pl.gamma1 >= 0.0 && pl.gamma1 < 1.0 && pl.gamma2 > 1.0))
            throw std::invalid_argument("oce: need 0 <= gamma1 < 1 < gamma2");
    }
    RiskFunctionalSpec s;
    s.tag = Tag::Oce;
    s.utility = utility;
    return s;
}

RiskFunctionalSpec RiskFunctionalSpec::shortfall(Loss loss, double x0) {
    // both loss families have range [0, inf), so interior means x0 > 0
    if (!(x0 > 0.0))
        throw std::invalid_argument("shortfall: x0 must be interior to the loss range (x0 > 0)");
    if (std::holds_alternative<PthPowerLoss>(loss) &&
        !(std::get<PthPowerLoss>(loss).p > 1.0))
        throw std::invalid_argument("shortfall: power loss needs p > 1");
    RiskFunctionalSpec s;
    s.tag = Tag::Shortfall;
    s.loss = loss;
    s.x0 = x0;
    return s;
}

RiskFunctionalSpec RiskFunctionalSpec::pth_moment(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("pth_moment: need p >= 1");
    RiskFunctionalSpec s;
    s.tag = Tag::PthMoment;
    s.p = p;
    return s;
}

double RiskFunctionalSpec::required_moment_order() const {
    switch (tag) {
        case Tag::Expectation:
        case Tag::CVaR:
        case Tag::UpperSemiDeviation:
            return 1.0;
        case Tag::Oce:
            return std::holds_alternative<QuadraticUtility>(utility) ? 2.0 : 1.0;
        case Tag::Shortfall:
            return std::holds_alternative<PthPowerLoss>(loss)
                       ? std::get<PthPowerLoss>(loss).p
                       : 1.0;
        case Tag::PthMoment:
            return p;
    }
    return 1.0;
}

std::string RiskFunctionalSpec::name() const {
    std::ostringstream os;
    switch (tag) {
        case Tag::Expectation:
            os << "expectation";
            break;
        case Tag::CVaR:
            os << "cvar(" << tau << ")";
            break;
        case Tag::UpperSemiDeviation:
            os << "upper_semideviation";
            break;
        case Tag::Oce:
            if (std::holds_alternative<QuadraticUtility>(utility)) {
                os << "oce(quadratic)";
            } else {
                const auto& pl = std::get<PiecewiseLinearUtility>(utility);
                os << "oce(piecewise_linear," << pl.gamma1 << "," << pl.gamma2 << ")";
            }
            break;
        case Tag::Shortfall:
            if (std::holds_alternative<DepositInsuranceLoss>(loss))
                os << "shortfall(deposit_insurance,x0=" << x0 << ")";
            else
                os << "shortfall(pth_power," << std::get<PthPowerLoss>(loss).p
                   << ",x0=" << x0 << ")";
            break;
        case Tag::PthMoment:
            os << "pth_moment(" << p << ")";
            break;
    }
    return os.str();
}

LipschitzCertificate certificate(const RiskFunctionalSpec& spec) {
    switch (spec.tag) {
        case RiskFunctionalSpec::Tag::Expectation:
            return {1.0, 1.0, 1.0, ""};
        case RiskFunctionalSpec::Tag::CVaR:
            return {1.0 / (1.0 - spec.tau), 1.0, 1.0, ""};
        case RiskFunctionalSpec::Tag::UpperSemiDeviation:
            return {2.0, 1.0, 1.0, ""};
        case RiskFunctionalSpec::Tag::Oce:
            if (std::holds_alternative<QuadraticUtility>(spec.utility))
                return {2.0, 2.0, 0.5, "xi_min <= -1"};
            return {std::get<PiecewiseLinearUtility>(spec.utility).gamma2, 1.0, 1.0, ""};
        case RiskFunctionalSpec::Tag::Shortfall:
            if (std::holds_alternative<DepositInsuranceLoss>(spec.loss))
                return {1.0, 1.0, 1.0,
                        "unit-multiplier regime: every sample exceeds the capital level"};
            return {1.0, std::get<PthPowerLoss>(spec.loss).p,
                    1.0 / std::get<PthPowerLoss>(spec.loss).p,
                    "xi_min >= 0 and unit-multiplier regime: capital level nonnegative, "
                    "mean marginal loss at the capital level >= 1"};
        case RiskFunctionalSpec::Tag::PthMoment:
            return {spec.p, spec.p, 1.0 / spec.p, ""};
    }
    throw std::logic_error("certificate: unknown spec tag");
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

void require_admissible(const RiskFunctionalSpec& spec, const Distribution& G) {
    const double order = spec.required_moment_order();
    if (!G.has_finite_moment(order)) {
        std::ostringstream os;
        os << spec.name() << ": law " << G.describe()
           << " lacks the required finite moment order " << order;
        throw std::domain_error(os.str());
    }
}

double mean_of(const Distribution& G, double tol) {
    return expect(G, [](double x) { return x; }, tol);
}

} // namespace

double cvar(const Distribution& G, double tau, double tol) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("cvar: tau must lie in (0,1)");
    if (!G.has_finite_moment(1.0))
        throw std::domain_error("cvar: law lacks a finite first moment");

    if (const auto atoms = G.atoms()) {
        // tail average above the tau-quantile with a fractional weight on the
        // atom the level cuts through; this equals the minimized form exactly
        double cum = 0.0;
        std::size_t k = 0;
        while (k < atoms->size() && cum + (*atoms)[k].second < tau - 1e-15)
            cum += (*atoms)[k++].second;
        const double var = (*atoms)[k].first;
        double tail = (cum + (*atoms)[k].second - tau) * var;
        for (std::size_t j = k + 1; j < atoms->size(); ++j)
            tail += (*atoms)[j].second * (*atoms)[j].first;
        return tail / (1.0 - tau);
    }

    const double lo = G.quantile(tau);
    const double hi = G.quantile(1.0 - 1e-8);
    const double span = hi - G.quantile(1e-8);
    const double delta = std::max(1e-6, 0.01 * span);
    const auto res = grid_minimize(
        [&](double r) {
            const double excess =
                expect(G, [r](double x) { return std::max(0.0, x - r); }, tol);
            return r + excess / (1.0 - tau);
        },
        Interval(lo - delta, std::max(hi, lo - delta)), 129, 6);
    return res.min;
}

double upper_semideviation(const Distribution& G, double tol) {
    if (!G.has_finite_moment(1.0))
        throw std::domain_error("upper_semideviation: law lacks a finite first moment");
    const double m = mean_of(G, tol);
    return expect(G, [m](double x) { return std::max(0.0, x - m); }, tol);
}

double oce_rho(const Distribution& G, const Utility& utility, double tol) {
    (void)tol;
    const auto atoms = G.atoms();
    if (!atoms)
        throw std::invalid_argument("oce_rho: supported on finitely supported laws only");
    const double order = std::holds_alternative<QuadraticUtility>(utility) ? 2.0 : 1.0;
    if (!G.has_finite_moment(order))
        throw std::domain_error("oce_rho: law lacks the required moment order");

    const double lo = atoms->front().first;
    const double hi = atoms->back().first;
    // rho = -sup_eta S(eta) = min_eta -S(eta); the certainty-equivalent sup
    // is attained inside the sample range
    const auto res = grid_minimize(
        [&](double eta) {
            double s = eta;
            for (const auto& [v, w] : *atoms) s += w * utility_value(utility, v - eta);
            return -s;
        },
        Interval(lo, hi), 129, 6);
    return res.min;
}

double shortfall_rho(const Distribution& G, const Loss& loss, double x0, double tol) {
    if (!(x0 > 0.0)) throw std::invalid_argument("shortfall_rho: need x0 > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("shortfall_rho: tol must be > 0");
    const double order = std::holds_alternative<PthPowerLoss>(loss)
                             ? std::get<PthPowerLoss>(loss).p
                             : 1.0;
    if (!G.has_finite_moment(order))
        throw std::domain_error("shortfall_rho: law lacks the required moment order");

    const auto atoms = G.atoms();
    auto g = [&](double m) -> double {
        if (atoms) {
            double s = 0.0;
            for (const auto& [v, w] : *atoms) s += w * loss_value(loss, v - m);
            return s - x0;
        }
        return expect(G, [&](double x) { return loss_value(loss, x - m); }, tol) - x0;
    };

    double lo, hi;
    if (atoms) {
        lo = atoms->front().first - 1.0;
        hi = atoms->back().first + 1.0;
    } else {
        lo = G.quantile(1e-9) - 1.0;
        hi = G.quantile(1.0 - 1e-9) + 1.0;
    }
    double span = std::max(1.0, hi - lo);
    int budget = 64;
    while (g(hi) > 0.0 && budget-- > 0) hi += (span *= 2.0);
    span = std::max(1.0, hi - lo);
    while (g(lo) <= 0.0 && budget-- > 0) lo -= (span *= 2.0);
    if (budget <= 0)
        throw std::runtime_error("shortfall_rho: no feasible capital level found while widening");

    // g is nonincreasing; converge onto inf{ m : g(m) <= 0 }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double pth_moment(const Distribution& G, double p, double tol) {
    if (!(p >= 1.0)) throw std::invalid_argument("pth_moment: need p >= 1");
    if (!G.has_finite_moment(p))
        throw std::domain_error("pth_moment: law lacks the required moment order");
    const bool integer_p = std::floor(p) == p;

    if (const auto atoms = G.atoms()) {
        double s = 0.0;
        for (const auto& [v, w] : *atoms) {
            if (v < 0.0 && !integer_p)
                throw std::domain_error("pth_moment: non-integer order with negative support");
            s += w * std::pow(v, p);
        }
        return s;
    }

    const double lo = G.quantile(1e-8);
    const double hi = G.quantile(1.0 - 1e-8);
    if (lo < 0.0 && !integer_p)
        throw std::domain_error("pth_moment: non-integer order with negative support");
    const auto bp = G.jump_points();
    double total = 0.0;
    if (lo < 0.0) {
        total -= integrate(
            [&](double x) { return G.cdf(x) * p * std::pow(x, p - 1.0); },
            Interval(lo, std::min(0.0, hi)), tol / 2, bp);
    }
    if (hi > 0.0) {
        total += integrate(
            [&](double x) { return (1.0 - G.cdf(x)) * p * std::pow(x, p - 1.0); },
            Interval(std::max(0.0, lo), hi), tol / 2, bp);
    }
    return total;
}

double evaluate(const RiskFunctionalSpec& spec, const Distribution& G, double tol) {
    require_admissible(spec, G);
    switch (spec.tag) {
        case RiskFunctionalSpec::Tag::Expectation:
            return mean_of(G, tol);
        case RiskFunctionalSpec::Tag::CVaR:
            return cvar(G, spec.tau, tol);
        case RiskFunctionalSpec::Tag::UpperSemiDeviation:
            return upper_semideviation(G, tol);
        case RiskFunctionalSpec::Tag::Oce:
            return oce_rho(G, spec.utility, tol);
        case RiskFunctionalSpec::Tag::Shortfall:
            return shortfall_rho(G, spec.loss, spec.x0, tol);
        case RiskFunctionalSpec::Tag::PthMoment:
            return pth_moment(G, spec.p, tol);
    }
    throw std::logic_error("evaluate: unknown spec tag");
}

} // namespace qrob
