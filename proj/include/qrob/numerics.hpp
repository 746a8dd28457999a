#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qrob {

struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_);
    double width() const noexcept { return hi - lo; }
};

/// Adaptive Simpson quadrature of f over `domain` to absolute tolerance
/// `abs_tol`. The integration is split at every declared breakpoint first,
/// so integrands that are only piecewise smooth (CDF jumps, weight kinks)
/// still converge at the usual rate. Non-finite values of f inside the
/// domain raise std::domain_error.
double integrate(const std::function<double(double)>& f, Interval domain,
                 double abs_tol, std::span<const double> breakpoints = {});

/// Root of a monotone function by bisection. Requires a sign change over
/// the bracket (or a root at an endpoint); terminates once |g(m)| <= tol or
/// the bracket width falls below tol. Throws std::invalid_argument when no
/// sign change is present.
double bisect_root(const std::function<double(double)>& g, Interval bracket,
                   double tol);

struct GridMinimum {
    double argmin;
    double min;
};

/// Nested grid search: `grid_points` samples per round, re-centred on the
/// best cell for `refine_rounds` rounds. Intended for the convex/unimodal
/// one-dimensional objectives used elsewhere in this library.
GridMinimum grid_minimize(const std::function<double(double)>& f,
                          Interval domain, int grid_points = 129,
                          int refine_rounds = 6);

/// Growth weight max{1, |x|, |y|}^(p-1).
double growth_weight(double x, double y, double p);

/// (1/N) * sum_k growth_weight(a_(k), b_(k), p) * |a_(k) - b_(k)| over the
/// order statistics of the two vectors. This is the tightest pairing of the
/// two samples: any other pairing gives a sum at least as large.
double sorted_pairing_cost(std::span<const double> a, std::span<const double> b,
                           double p);

/// min over all permutations k of sum_i |a_i - b_{k_i}|. Factorial
/// enumeration, capped at N <= 9; exists as an independent oracle for
/// sorted_pairing_cost, not for production use.
double min_over_permutations(std::span<const double> a,
                             std::span<const double> b);

/// Feasibility of an eps-coupling between two equal-weight samples of equal
/// size N: true iff the bipartite graph joining x_i to y_j whenever
/// |x_i - y_j| <= eps admits a matching that leaves at most floor(eps*N)
/// points unmatched. Computed exactly by max-flow with a slack sink of
/// capacity floor(eps*N).
bool coupling_feasible(std::span<const double> x, std::span<const double> y,
                       double eps);

} // namespace qrob
