#pragma once

#include <optional>
#include <string>

#include "qrob/distribution.hpp"
#include "qrob/gauge.hpp"

namespace qrob {

/// Result of a metric computation: a non-negative value (or +inf for
/// inadmissible pairs) together with how it was obtained. Bracket results
/// carry certified lower/upper bounds and report their midpoint as `value`.
struct MetricValue {
    enum class Exactness { Exact, Quadrature, Bracket };

    double value = 0.0;
    Exactness exactness = Exactness::Exact;
    double tol = 0.0; // quadrature error bound
    double lo = 0.0;
    double hi = 0.0; // bracket bounds

    static MetricValue exact(double v);
    static MetricValue quadrature(double v, double tol);
    static MetricValue bracket(double lo, double hi);

    bool is_infinite() const noexcept;
    std::string exactness_str() const;
};

/// Integral of |F_P - F_Q| over the line. Exact for pairs of step laws
/// (order-statistics formula for equal-size empirical pairs, merged-jump
/// scan otherwise); quadrature with declared jump breakpoints elsewhere.
/// Pairs without a finite first moment return the +inf sentinel.
MetricValue kantorovich(const Distribution& P, const Distribution& Q, double tol);

/// Integral of max{1,|x|^(p-1)} |F_P - F_Q|, p >= 1; coincides with
/// kantorovich at p = 1. Exact piecewise closed form for step pairs,
/// quadrature otherwise; +inf sentinel for pairs not admissible at order p.
MetricValue fortet_mourier(const Distribution& P, const Distribution& Q,
                           double p, double tol);

/// The same integral evaluated by adaptive quadrature regardless of the
/// structure of the pair. Serves as an independent cross-check of the
/// closed-form path.
MetricValue fortet_mourier_quadrature(const Distribution& P,
                                      const Distribution& Q, double p,
                                      double tol);

/// sup |F_P - F_Q|. Exact whenever at least one law is a pure step law;
/// grid-refined otherwise.
MetricValue kolmogorov(const Distribution& P, const Distribution& Q);

/// sup |F_P - F_Q| phi; phi must be u-shaped. Constancy intervals are
/// scored with one-sided suprema of phi (the supremum may be approached,
/// not attained). Returns the +inf sentinel when a heavy tail makes the
/// weighted difference diverge.
MetricValue weighted_kolmogorov(const Distribution& P, const Distribution& Q,
                                const GaugeFunction& phi);

/// Levy distance: smallest eps with Q(x-eps)-eps <= P(x) <= Q(x+eps)+eps for
/// all x, located by bisection to tolerance tol. Always <= 1.
MetricValue levy(const Distribution& P, const Distribution& Q, double tol);

/// Prokhorov distance between equal-size equal-weight samples, computed
/// exactly: feasibility of the eps-coupling is decided by max-flow and the
/// smallest feasible eps is found over the finite candidate set
/// {|x_i - y_j|} union {k/N}.
MetricValue prokhorov(const EmpiricalDistribution& P,
                      const EmpiricalDistribution& Q, double tol);

/// General-pair Prokhorov: dispatches to the exact empirical path when
/// possible, otherwise returns the certified bracket [0, sqrt(kantorovich)].
MetricValue prokhorov(const Distribution& P, const Distribution& Q, double tol);

/// d_phi = prokhorov + |integral phi dP - integral phi dQ|; +inf sentinel
/// when either phi-moment is infinite.
MetricValue d_phi(const Distribution& P, const Distribution& Q,
                  const GaugeFunction& phi, double tol);

/// Bounded-Lipschitz bracket [(2/3) d_Prok^2, 2 d_Prok] derived from the
/// exact empirical Prokhorov distance.
MetricValue bl_bracket(const EmpiricalDistribution& P,
                       const EmpiricalDistribution& Q, double tol);

/// Tagged metric selector, the unit the CLI dispatches on.
struct MetricKind {
    enum class Tag {
        Kantorovich,
        FortetMourier,
        Kolmogorov,
        WeightedKolmogorov,
        Levy,
        Prokhorov,
        DPhi,
        BlBracket
    };

    Tag tag = Tag::Kantorovich;
    double p = 1.0;
    std::optional<GaugeFunction> gauge;

    static MetricKind kantorovich();
    static MetricKind fortet_mourier(double p);
    static MetricKind kolmogorov();
    static MetricKind weighted_kolmogorov(GaugeFunction phi);
    static MetricKind levy();
    static MetricKind prokhorov();
    static MetricKind d_phi(GaugeFunction phi);
    static MetricKind bl_bracket();

    std::string name() const;
};

MetricValue compute_metric(const MetricKind& kind, const Distribution& P,
                           const Distribution& Q, double tol);

} // namespace qrob
