#include "qrob/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qrob/numerics.hpp"

namespace qrob {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailQuantile = 1e-8; // truncation level for unbounded supports
} // namespace

MetricValue MetricValue::exact(double v) { return {v, Exactness::Exact, 0.0, v, v}; }

MetricValue MetricValue::quadrature(double v, double tol) {
    return {v, Exactness::Quadrature, tol, v - tol, v + tol};
}

MetricValue MetricValue::bracket(double lo, double hi) {
    return {0.5 * (lo + hi), Exactness::Bracket, 0.0, lo, hi};
}

bool MetricValue::is_infinite() const noexcept { return std::isinf(value); }

std::string MetricValue::exactness_str() const {
    switch (exactness) {
        case Exactness::Exact:
            return "exact";
        case Exactness::Quadrature: {
            std::ostringstream os;
            os << "quadrature(" << tol << ")";
            return os.str();
        }
        case Exactness::Bracket:
            return "bracket";
    }
    return {};
}

// ---------------------------------------------------------------------------
// shared pieces

namespace {

// antiderivative of max{1, |t|^(p-1)}, odd in x
double cp_antiderivative(double x, double p) {
    const double ax = std::abs(x);
    const double v = ax <= 1.0 ? ax : 1.0 + (std::pow(ax, p) - 1.0) / p;
    return x < 0.0 ? -v : v;
}

struct MergedStep {
    std::vector<double> points;  // merged atom locations, ascending
    std::vector<double> cum_p;   // F_P right after each point
    std::vector<double> cum_q;   // F_Q right after each point
};

MergedStep merge_step_pair(const Distribution& P, const Distribution& Q) {
    const auto ap = P.atoms();
    const auto aq = Q.atoms();
    MergedStep m;
    std::size_t i = 0, j = 0;
    double fp = 0.0, fq = 0.0;
    while (i < ap->size() || j < aq->size()) {
        double x;
        if (i < ap->size() && j < aq->size())
            x = std::min((*ap)[i].first, (*aq)[j].first);
        else if (i < ap->size())
            x = (*ap)[i].first;
        else
            x = (*aq)[j].first;
        while (i < ap->size() && (*ap)[i].first == x) fp += (*ap)[i++].second;
        while (j < aq->size() && (*aq)[j].first == x) fq += (*aq)[j++].second;
        m.points.push_back(x);
        m.cum_p.push_back(fp);
        m.cum_q.push_back(fq);
    }
    return m;
}

// exact integral of w_p |F_P - F_Q| for a pair of step laws
double fm_step_exact(const Distribution& P, const Distribution& Q, double p) {
    const MergedStep m = merge_step_pair(P, Q);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < m.points.size(); ++k) {
        const double diff = std::abs(m.cum_p[k] - m.cum_q[k]);
        if (diff == 0.0) continue;
        total += diff * (cp_antiderivative(m.points[k + 1], p) -
                         cp_antiderivative(m.points[k], p));
    }
    return total;
}

// truncation bounds for quadrature over unbounded supports
Interval truncated_domain(const Distribution& P, const Distribution& Q) {
    const double lo = std::min(P.quantile(kTailQuantile), Q.quantile(kTailQuantile));
    const double hi = std::max(P.quantile(1.0 - kTailQuantile), Q.quantile(1.0 - kTailQuantile));
    return Interval(std::min(lo, hi), std::max(lo, hi));
}

// bound on the mass of w_p |F_P - F_Q| left outside [lo, hi]:
//   integral_{-inf}^{lo} w_p F_G <= integral_0^{F_G(lo)} (C_p(lo) - C_p(q_G(t))) dt
// and symmetrically on the right, summed over both laws.
double tail_remainder_bound(const Distribution& G, double p, double lo, double hi) {
    const double u_eps = 1e-13;
    double bound = 0.0;
    if (G.cdf(lo) > 0.0) {
        bound += integrate(
            [&](double t) {
                return std::max(0.0, cp_antiderivative(lo, p) -
                                         cp_antiderivative(G.quantile(t), p));
            },
            Interval(u_eps, kTailQuantile), 1e-12);
    }
    if (G.cdf(hi) < 1.0) {
        bound += integrate(
            [&](double t) {
                return std::max(0.0, cp_antiderivative(G.quantile(t), p) -
                                         cp_antiderivative(hi, p));
            },
            Interval(1.0 - kTailQuantile, 1.0 - u_eps), 1e-12);
    }
    return bound;
}

std::vector<double> cdf_breakpoints(const Distribution& P, const Distribution& Q,
                                    bool with_weight_kinks) {
    std::vector<double> bp = P.jump_points();
    const auto jq = Q.jump_points();
    bp.insert(bp.end(), jq.begin(), jq.end());
    if (with_weight_kinks) {
        bp.push_back(-1.0);
        bp.push_back(0.0);
        bp.push_back(1.0);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

bool both_admissible(const Distribution& P, const Distribution& Q, double p) {
    return is_admissible(P, p) && is_admissible(Q, p);
}

// candidate abscissas where a sup over x of a CDF expression can live:
// every jump of either law plus, for laws with a continuous part, a graded
// quantile grid
std::vector<double> sup_candidates(const Distribution& P, const Distribution& Q) {
    std::vector<double> xs = cdf_breakpoints(P, Q, false);
    const bool need_grid = !P.is_step() || !Q.is_step();
    if (need_grid) {
        constexpr int kGrid = 2048;
        xs.reserve(xs.size() + 2 * kGrid + 40);
        for (const Distribution* d : {&P, &Q}) {
            for (int i = 1; i < kGrid; ++i)
                xs.push_back(d->quantile(static_cast<double>(i) / kGrid));
            for (int k = 2; k <= 8; ++k) {
                xs.push_back(d->quantile(std::pow(10.0, -k)));
                xs.push_back(d->quantile(1.0 - std::pow(10.0, -k)));
            }
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }
    return xs;
}

} // namespace

// ---------------------------------------------------------------------------
// Kantorovich / Fortet-Mourier

MetricValue fortet_mourier_quadrature(const Distribution& P, const Distribution& Q,
                                      double p, double tol) {
    if (!(p >= 1.0)) throw std::invalid_argument("fortet_mourier: need p >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("fortet_mourier: tol must be > 0");
    if (!both_admissible(P, Q, p)) return MetricValue::exact(kInf);

    const Interval domain = truncated_domain(P, Q);
    const auto bp = cdf_breakpoints(P, Q, true);
    const double value = integrate(
        [&](double x) {
            const double w = std::max(1.0, p == 1.0 ? 1.0 : std::pow(std::abs(x), p - 1.0));
            return w * std::abs(P.cdf(x) - Q.cdf(x));
        },
        domain, tol, bp);
    double reported = tol;
    if (!P.is_step() || !Q.is_step())
        reported += tail_remainder_bound(P, p, domain.lo, domain.hi) +
                    tail_remainder_bound(Q, p, domain.lo, domain.hi);
    return MetricValue::quadrature(value, reported);
}

MetricValue fortet_mourier(const Distribution& P, const Distribution& Q, double p,
                           double tol) {
    if (!(p >= 1.0)) throw std::invalid_argument("fortet_mourier: need p >= 1");
    if (!both_admissible(P, Q, p)) return MetricValue::exact(kInf);
    if (P.is_step() && Q.is_step()) return MetricValue::exact(fm_step_exact(P, Q, p));
    return fortet_mourier_quadrature(P, Q, p, tol);
}

MetricValue kantorovich(const Distribution& P, const Distribution& Q, double tol) {
    if (!both_admissible(P, Q, 1.0)) return MetricValue::exact(kInf);
    const auto* ep = P.as_empirical();
    const auto* eq = Q.as_empirical();
    if (ep && eq && ep->size() == eq->size()) {
        // order statistics pair up; weights are all one at p = 1
        return MetricValue::exact(sorted_pairing_cost(ep->samples(), eq->samples(), 1.0));
    }
    return fortet_mourier(P, Q, 1.0, tol);
}

// ---------------------------------------------------------------------------
// Kolmogorov and weighted Kolmogorov

namespace {

double sup_abs_cdf_diff_at(const Distribution& P, const Distribution& Q, double x) {
    return std::max(std::abs(P.cdf(x) - Q.cdf(x)),
                    std::abs(P.cdf_left(x) - Q.cdf_left(x)));
}

} // namespace

MetricValue kolmogorov(const Distribution& P, const Distribution& Q) {
    const auto xs = sup_candidates(P, Q);
    double best = 0.0;
    double best_x = xs.empty() ? 0.0 : xs.front();
    for (double x : xs) {
        const double d = sup_abs_cdf_diff_at(P, Q, x);
        if (d > best) {
            best = d;
            best_x = x;
        }
    }
    if (P.is_step() || Q.is_step()) {
        // between candidate points the difference is monotone, so the scan
        // over one-sided values is the exact supremum
        return MetricValue::exact(best);
    }
    // refine around the best grid point
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (xs[i] <= best_x && best_x <= xs[i + 1])
            h = std::max(h, xs[i + 1] - xs[i]);
    if (h == 0.0) h = 1e-3 * (1.0 + std::abs(best_x));
    const auto res = grid_minimize(
        [&](double x) { return -sup_abs_cdf_diff_at(P, Q, x); },
        Interval(best_x - h, best_x + h), 65, 6);
    best = std::max(best, -res.min);
    const double window = 2.0 * h / std::pow(32.0, 6);
    return MetricValue::quadrature(best, std::max(window, 1e-12));
}

namespace {

// Can (1-F)*phi or F*phi stay bounded in the tails of this law? A Pareto
// tail of index alpha keeps x^g * (1-F(x)) bounded exactly when g <= alpha;
// every other family in the library beats any polynomial weight.
bool tail_sup_finite(const Distribution& d, double growth) {
    return growth <= d.finite_moment_order();
}

} // namespace

MetricValue weighted_kolmogorov(const Distribution& P, const Distribution& Q,
                                const GaugeFunction& phi) {
    if (!phi.is_u_shaped())
        throw std::invalid_argument("weighted_kolmogorov: gauge must be u-shaped");

    if (P.is_step() && Q.is_step()) {
        const MergedStep m = merge_step_pair(P, Q);
        double best = 0.0;
        for (std::size_t k = 0; k + 1 < m.points.size(); ++k) {
            const double diff = std::abs(m.cum_p[k] - m.cum_q[k]);
            if (diff == 0.0) continue;
            // u-shaped phi attains its interval supremum at an endpoint; the
            // right endpoint enters as a one-sided limit
            const double sup_phi = std::max(phi(m.points[k]), phi(m.points[k + 1]));
            best = std::max(best, diff * sup_phi);
        }
        return MetricValue::exact(best);
    }

    if (!tail_sup_finite(P, phi.growth_order()) || !tail_sup_finite(Q, phi.growth_order()))
        return MetricValue::exact(kInf);

    const auto xs = sup_candidates(P, Q);
    double best = 0.0, best_x = xs.empty() ? 0.0 : xs.front();
    auto weighted = [&](double x) {
        return std::max(std::abs(P.cdf(x) - Q.cdf(x)),
                        std::abs(P.cdf_left(x) - Q.cdf_left(x))) *
               phi(x);
    };
    for (double x : xs) {
        const double d = weighted(x);
        if (d > best) {
            best = d;
            best_x = x;
        }
    }
    double h = 1e-3 * (1.0 + std::abs(best_x));
    const auto res = grid_minimize([&](double x) { return -weighted(x); },
                                   Interval(best_x - h, best_x + h), 65, 6);
    best = std::max(best, -res.min);
    return MetricValue::quadrature(best, std::max(2.0 * h / std::pow(32.0, 6), 1e-12));
}

// ---------------------------------------------------------------------------
// Levy

namespace {

// sup over x of F_A(x) - F_B(x + shift), over one-sided values at candidates
double sup_shifted_diff(const Distribution& A, const Distribution& B, double shift,
                        const std::vector<double>& xs_a,
                        const std::vector<double>& xs_b) {
    double best = -kInf;
    for (double x : xs_a) {
        best = std::max(best, A.cdf(x) - B.cdf(x + shift));
        best = std::max(best, A.cdf_left(x) - B.cdf_left(x + shift));
    }
    for (double xb : xs_b) {
        const double x = xb - shift;
        best = std::max(best, A.cdf(x) - B.cdf(xb));
        best = std::max(best, A.cdf_left(x) - B.cdf_left(xb));
    }
    return best;
}

} // namespace

MetricValue levy(const Distribution& P, const Distribution& Q, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("levy: tol must be > 0");
    const auto xs_p = sup_candidates(P, P);
    const auto xs_q = sup_candidates(Q, Q);

    auto feasible = [&](double eps) {
        return sup_shifted_diff(P, Q, eps, xs_p, xs_q) <= eps + 1e-13 &&
               sup_shifted_diff(Q, P, eps, xs_q, xs_p) <= eps + 1e-13;
    };

    double lo = 0.0, hi = 1.0; // the distance never exceeds 1
    if (feasible(0.0)) return MetricValue::quadrature(0.0, tol);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return MetricValue::quadrature(hi, tol);
}

// ---------------------------------------------------------------------------
// Prokhorov and derived brackets

MetricValue prokhorov(const EmpiricalDistribution& P, const EmpiricalDistribution& Q,
                      double tol) {
    (void)tol; // the candidate scan below is exact
    if (P.size() != Q.size())
        throw std::invalid_argument("prokhorov: exact path needs equal sample counts");
    if (P.size() > 1000)
        throw std::invalid_argument("prokhorov: exact path capped at N <= 1000");

    const auto& xs = P.samples();
    const auto& ys = Q.samples();
    const std::size_t n = xs.size();

    // feasibility changes only where a new pair joins the graph or the slack
    // budget floor(eps*N) steps, so the infimum is attained on this set
    std::vector<double> cand;
    cand.reserve(n * n + n + 1);
    cand.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cand.push_back(std::abs(xs[i] - ys[j]));
    for (std::size_t k = 1; k <= n; ++k)
        cand.push_back(static_cast<double>(k) / static_cast<double>(n));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::size_t lo = 0, hi = cand.size() - 1; // last candidate always feasible
    if (coupling_feasible(xs, ys, cand[0])) return MetricValue::exact(cand[0]);
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (coupling_feasible(xs, ys, cand[mid]))
            hi = mid;
        else
            lo = mid;
    }
    return MetricValue::exact(cand[hi]);
}

MetricValue prokhorov(const Distribution& P, const Distribution& Q, double tol) {
    const auto* ep = P.as_empirical();
    const auto* eq = Q.as_empirical();
    if (ep && eq && ep->size() == eq->size()) return prokhorov(*ep, *eq, tol);
    const MetricValue dk = kantorovich(P, Q, tol);
    const double hi = dk.is_infinite() ? 1.0 : std::min(1.0, std::sqrt(dk.value));
    return MetricValue::bracket(0.0, hi);
}

MetricValue d_phi(const Distribution& P, const Distribution& Q,
                  const GaugeFunction& phi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("d_phi: tol must be > 0");
    const double mp = moment(P, phi, tol);
    const double mq = moment(Q, phi, tol);
    if (std::isinf(mp) || std::isinf(mq)) return MetricValue::exact(kInf);
    const double gap = std::abs(mp - mq);

    const MetricValue prok = prokhorov(P, Q, tol);
    const bool moments_exact = P.atoms().has_value() && Q.atoms().has_value();
    if (prok.exactness == MetricValue::Exactness::Bracket)
        return MetricValue::bracket(gap + prok.lo, gap + prok.hi);
    if (moments_exact && prok.exactness == MetricValue::Exactness::Exact)
        return MetricValue::exact(gap + prok.value);
    return MetricValue::quadrature(gap + prok.value, 2.0 * tol + prok.tol);
}

MetricValue bl_bracket(const EmpiricalDistribution& P, const EmpiricalDistribution& Q,
                       double tol) {
    const MetricValue d = prokhorov(P, Q, tol);
    return MetricValue::bracket(2.0 / 3.0 * d.value * d.value, 2.0 * d.value);
}

// ---------------------------------------------------------------------------
// MetricKind dispatch

MetricKind MetricKind::kantorovich() { return {Tag::Kantorovich, 1.0, std::nullopt}; }

MetricKind MetricKind::fortet_mourier(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("fortet_mourier: need p >= 1");
    return {Tag::FortetMourier, p, std::nullopt};
}

MetricKind MetricKind::kolmogorov() { return {Tag::Kolmogorov, 1.0, std::nullopt}; }

MetricKind MetricKind::weighted_kolmogorov(GaugeFunction phi) {
    if (!phi.is_u_shaped())
        throw std::invalid_argument("weighted_kolmogorov: gauge must be u-shaped");
    return {Tag::WeightedKolmogorov, 1.0, std::move(phi)};
}

MetricKind MetricKind::levy() { return {Tag::Levy, 1.0, std::nullopt}; }
MetricKind MetricKind::prokhorov() { return {Tag::Prokhorov, 1.0, std::nullopt}; }

MetricKind MetricKind::d_phi(GaugeFunction phi) {
    return {Tag::DPhi, 1.0, std::move(phi)};
}

MetricKind MetricKind::bl_bracket() { return {Tag::BlBracket, 1.0, std::nullopt}; }

std::string MetricKind::name() const {
    switch (tag) {
        case Tag::Kantorovich: return "kantorovich";
        case Tag::FortetMourier: return "fortet_mourier";
        case Tag::Kolmogorov: return "kolmogorov";
        case Tag::WeightedKolmogorov: return "weighted_kolmogorov";
        case Tag::Levy: return "levy";
        case Tag::Prokhorov: return "prokhorov";
        case Tag::DPhi: return "d_phi";
        case Tag::BlBracket: return "bl_bracket";
    }
    return {};
}

namespace {

EmpiricalDistribution require_empirical(const Distribution& d, const char* what) {
    const auto* e = d.as_empirical();
    if (!e) throw std::invalid_argument(std::string(what) + ": needs empirical laws");
    return *e;
}

} // namespace

MetricValue compute_metric(const MetricKind& kind, const Distribution& P,
                           const Distribution& Q, double tol) {
    switch (kind.tag) {
        case MetricKind::Tag::Kantorovich:
            return kantorovich(P, Q, tol);
        case MetricKind::Tag::FortetMourier:
            return fortet_mourier(P, Q, kind.p, tol);
        case MetricKind::Tag::Kolmogorov:
            return kolmogorov(P, Q);
        case MetricKind::Tag::WeightedKolmogorov:
            return weighted_kolmogorov(P, Q, *kind.gauge);
        case MetricKind::Tag::Levy:
            return levy(P, Q, tol);
        case MetricKind::Tag::Prokhorov:
            return prokhorov(P, Q, tol);
        case MetricKind::Tag::DPhi:
            return d_phi(P, Q, *kind.gauge, tol);
        case MetricKind::Tag::BlBracket:
            return bl_bracket(require_empirical(P, "bl_bracket"),
                              require_empirical(Q, "bl_bracket"), tol);
    }
    throw std::logic_error("compute_metric: unknown metric tag");
}

} // namespace qrob
