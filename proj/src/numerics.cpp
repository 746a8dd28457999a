#include "qrob/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace qrob {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi)
        throw std::invalid_argument("Interval: need finite lo <= hi");
}

namespace {

double eval_checked(const std::function<double(double)>& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw std::domain_error("integrate: non-finite integrand value at x=" +
                                std::to_string(x));
    return v;
}

double simpson(double fa, double fm, double fb, double h) {
    return (fa + 4.0 * fm + fb) * h / 6.0;
}

// Classic adaptive Simpson with the 15x error estimate. `whole` is the
// Simpson value over [a,b]; fa/fm/fb are cached endpoint/midpoint values.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval_checked(f, lm);
    const double frm = eval_checked(f, rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_panel(const std::function<double(double)>& f, double a,
                       double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = eval_checked(f, a);
    const double fm = eval_checked(f, m);
    const double fb = eval_checked(f, b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

double integrate(const std::function<double(double)>& f, Interval domain,
                 double abs_tol, std::span<const double> breakpoints) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: abs_tol must be > 0");
    if (domain.lo == domain.hi) return 0.0;

    std::vector<double> cuts;
    cuts.reserve(breakpoints.size() + 2);
    cuts.push_back(domain.lo);
    for (double b : breakpoints)
        if (b > domain.lo && b < domain.hi) cuts.push_back(b);
    cuts.push_back(domain.hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const std::size_t panels = cuts.size() - 1;
    const double panel_tol = abs_tol / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate_panel(f, cuts[i], cuts[i + 1], panel_tol);
    return total;
}

double bisect_root(const std::function<double(double)>& g, Interval bracket,
                   double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("bisect_root: tol must be > 0");
    double lo = bracket.lo, hi = bracket.hi;
    double glo = g(lo), ghi = g(hi);
    if (!std::isfinite(glo) || !std::isfinite(ghi))
        throw std::domain_error("bisect_root: non-finite endpoint value");
    if (std::abs(glo) <= tol) return lo;
    if (std::abs(ghi) <= tol) return hi;
    if ((glo > 0.0) == (ghi > 0.0))
        throw std::invalid_argument("bisect_root: no sign change over bracket");

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket exhausted in doubles
        const double gm = g(mid);
        if (!std::isfinite(gm))
            throw std::domain_error("bisect_root: non-finite value inside bracket");
        if (std::abs(gm) <= tol) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

GridMinimum grid_minimize(const std::function<double(double)>& f,
                          Interval domain, int grid_points, int refine_rounds) {
    if (grid_points < 3) throw std::invalid_argument("grid_minimize: need grid_points >= 3");
    if (refine_rounds < 1) throw std::invalid_argument("grid_minimize: need refine_rounds >= 1");

    double lo = domain.lo, hi = domain.hi;
    double best_x = lo;
    double best_v = std::numeric_limits<double>::infinity();

    for (int round = 0; round < refine_rounds; ++round) {
        if (hi <= lo) break;
        const double step = (hi - lo) / (grid_points - 1);
        int best_i = 0;
        double round_best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_points; ++i) {
            const double x = (i + 1 == grid_points) ? hi : lo + step * i;
            const double v = f(x);
            if (!std::isfinite(v))
                throw std::domain_error("grid_minimize: non-finite objective value");
            if (v < round_best) {
                round_best = v;
                best_i = i;
            }
        }
        const double x_star = (best_i + 1 == grid_points) ? hi : lo + step * best_i;
        if (round_best < best_v) {
            best_v = round_best;
            best_x = x_star;
        }
        const double new_lo = std::max(domain.lo, x_star - step);
        const double new_hi = std::min(domain.hi, x_star + step);
        lo = new_lo;
        hi = new_hi;
    }
    if (!std::isfinite(best_v)) { // zero-width domain
        best_x = domain.lo;
        best_v = f(domain.lo);
    }
    return {best_x, best_v};
}

double growth_weight(double x, double y, double p) {
    const double m = std::max({1.0, std::abs(x), std::abs(y)});
    return (p == 1.0) ? 1.0 : std::pow(m, p - 1.0);
}

double sorted_pairing_cost(std::span<const double> a, std::span<const double> b,
                           double p) {
    if (a.size() != b.size())
        throw std::invalid_argument("sorted_pairing_cost: length mismatch");
    if (a.empty()) throw std::invalid_argument("sorted_pairing_cost: empty input");
    if (!(p >= 1.0)) throw std::invalid_argument("sorted_pairing_cost: need p >= 1");

    std::vector<double> as(a.begin(), a.end()), bs(b.begin(), b.end());
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < as.size(); ++i)
        sum += growth_weight(as[i], bs[i], p) * std::abs(as[i] - bs[i]);
    return sum / static_cast<double>(as.size());
}

double min_over_permutations(std::span<const double> a,
                             std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("min_over_permutations: length mismatch");
    if (a.empty() || a.size() > 9)
        throw std::invalid_argument("min_over_permutations: oracle needs 1 <= N <= 9");

    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            sum += std::abs(a[i] - b[idx[i]]);
        best = std::min(best, sum);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

namespace {

// Dinic max-flow on a small bipartite graph with unit capacities plus one
// slack node; exact for the equal-weight coupling feasibility test.
class MaxFlow {
public:
    explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

    void add_edge(int from, int to, int cap) {
        edges_.push_back({to, head_[from], cap});
        head_[from] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({from, head_[to], 0});
        head_[to] = static_cast<int>(edges_.size()) - 1;
    }

    int run(int s, int t) {
        int flow = 0;
        while (bfs(s, t)) {
            it_ = head_;
            while (int pushed = dfs(s, t, std::numeric_limits<int>::max()))
                flow += pushed;
        }
        return flow;
    }

private:
    struct Edge {
        int to;
        int next;
        int cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int e = head_[v]; e != -1; e = edges_[e].next) {
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[v] + 1;
                    q.push(edges_[e].to);
                }
            }
        }
        return level_[t] >= 0;
    }

    int dfs(int v, int t, int f) {
        if (v == t) return f;
        for (int& e = it_[v]; e != -1; e = edges_[e].next) {
            Edge& ed = edges_[e];
            if (ed.cap > 0 && level_[ed.to] == level_[v] + 1) {
                const int d = dfs(ed.to, t, std::min(f, ed.cap));
                if (d > 0) {
                    ed.cap -= d;
                    edges_[e ^ 1].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> it_;
};

} // namespace

bool coupling_feasible(std::span<const double> x, std::span<const double> y,
                       double eps) {
    if (x.size() != y.size())
        throw std::invalid_argument("coupling_feasible: length mismatch");
    if (!(eps >= 0.0)) throw std::invalid_argument("coupling_feasible: need eps >= 0");
    const int n = static_cast<int>(x.size());
    if (n == 0) return true;

    // floor(eps*N) with a guard against k/N*N rounding just below k
    const int slack = static_cast<int>(std::floor(eps * n + 1e-9));
    if (slack >= n) return true;

    const int source = 0, slack_node = 2 * n + 1, sink = 2 * n + 2;
    MaxFlow flow(2 * n + 3);
    for (int i = 0; i < n; ++i) {
        flow.add_edge(source, 1 + i, 1);
        flow.add_edge(1 + i, slack_node, 1);
        flow.add_edge(1 + n + i, sink, 1);
    }
    flow.add_edge(slack_node, sink, slack);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(x[i] - y[j]) <= eps) flow.add_edge(1 + i, 1 + n + j, 1);

    return flow.run(source, sink) == n;
}

} // namespace qrob
