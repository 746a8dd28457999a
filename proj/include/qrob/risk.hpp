#pragma once

#include <string>
#include <variant>

#include "qrob/distribution.hpp"

namespace qrob {

/// Normalized concave non-decreasing utilities (u(0) = 0, 1 in the
/// subdifferential at 0).
struct PiecewiseLinearUtility {
    double gamma1; // slope on gains, 0 <= gamma1 < 1
    double gamma2; // slope on losses, gamma2 > 1
};
struct QuadraticUtility {}; // t - t^2/2 below 1, saturating at 1/2

using Utility = std::variant<PiecewiseLinearUtility, QuadraticUtility>;

double utility_value(const Utility& u, double t);

/// Increasing convex loss functions for the shortfall risk measure.
struct DepositInsuranceLoss {}; // max(x, 0)
struct PthPowerLoss {
    double p; // x^p / p on x >= 0, zero below; p > 1
};

using Loss = std::variant<DepositInsuranceLoss, PthPowerLoss>;

double loss_value(const Loss& l, double x);
double loss_derivative_right(const Loss& l, double x);

/// Tagged description of a law-invariant risk functional.
struct RiskFunctionalSpec {
    enum class Tag {
        Expectation,
        CVaR,
        UpperSemiDeviation,
        Oce,
        Shortfall,
        PthMoment
    };

    Tag tag = Tag::Expectation;
    double tau = 0.0;   // CVaR level
    Utility utility{};  // OCE
    Loss loss{};        // shortfall
    double x0 = 0.0;    // shortfall acceptability threshold
    double p = 1.0;     // moment order

    static RiskFunctionalSpec expectation();
    static RiskFunctionalSpec cvar(double tau);
    static RiskFunctionalSpec upper_semideviation();
    static RiskFunctionalSpec oce(Utility utility);
    static RiskFunctionalSpec shortfall(Loss loss, double x0);
    static RiskFunctionalSpec pth_moment(double p);

    /// Moment order the input law must admit for evaluation.
    double required_moment_order() const;
    std::string name() const;
};

/// Lipschitz constant L and growth order p attached to a risk functional,
/// with the reciprocal 1/p as the robustness index. `conditions` names the
/// sample-side regime under which the pair (L, p) is actually valid.
struct LipschitzCertificate {
    double L;
    double p;
    double iqr;
    std::string conditions;
};

LipschitzCertificate certificate(const RiskFunctionalSpec& spec);

/// Evaluate the functional on a law. Empirical (and generally finitely
/// supported) laws are evaluated by closed forms; parametric laws fall back
/// to quadrature plus one-dimensional optimization where needed. Throws
/// std::domain_error when the law lacks the required moment order.
double evaluate(const RiskFunctionalSpec& spec, const Distribution& G, double tol);

double cvar(const Distribution& G, double tau, double tol);
double upper_semideviation(const Distribution& G, double tol);
/// -S_u(G) with S_u(G) = sup_eta { eta + E u(X - eta) }; finitely supported
/// laws only, with the sup restricted to [min sample, max sample].
double oce_rho(const Distribution& G, const Utility& utility, double tol);
/// inf { m : E l(X - m) <= x0 }, solved by monotone bisection on the
/// constraint; the bracket is widened until a sign change appears.
double shortfall_rho(const Distribution& G, const Loss& loss, double x0, double tol);
double pth_moment(const Distribution& G, double p, double tol);

} // namespace qrob
