#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qrob/numerics.hpp"
#include "qrob/risk.hpp"
#include "qrob/rng.hpp"

using namespace qrob;

namespace {

std::vector<double> random_samples(RngStream& rng, std::size_t max_n, double lo,
                                   double hi) {
    const auto n = static_cast<std::size_t>(1 + rng.next_uniform01() * max_n);
    std::vector<double> out(std::min(n, max_n));
    for (auto& v : out) v = rng.next_uniform(lo, hi);
    return out;
}

// direct minimization of the tail-average objective, the independent oracle
// for the cvar closed form
double cvar_grid_oracle(const std::vector<double>& xs, double tau) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const auto res = grid_minimize(
        [&](double r) {
            double s = 0.0;
            for (double x : xs) s += std::max(0.0, x - r);
            return r + s / ((1.0 - tau) * static_cast<double>(xs.size()));
        },
        Interval(*lo, *hi), 257, 7);
    return res.min;
}

// dense scan of the certainty-equivalent objective
double oce_dense_oracle(const std::vector<double>& xs, const Utility& u) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    double best = -1e300;
    const int grid = 200001;
    for (int i = 0; i < grid; ++i) {
        const double eta = *lo + (*hi - *lo) * i / (grid - 1);
        double s = eta;
        for (double x : xs) s += utility_value(u, x - eta) / static_cast<double>(xs.size());
        best = std::max(best, s);
    }
    return -best;
}

} // namespace

TEST_CASE("evaluate: declared examples") {
    CHECK(evaluate(RiskFunctionalSpec::expectation(), Distribution::empirical({1, 2, 3}),
                   1e-10) == doctest::Approx(2.0));
    CHECK(evaluate(RiskFunctionalSpec::cvar(0.5), Distribution::empirical({1, 2, 3, 4}),
                   1e-10) == doctest::Approx(3.5));
    CHECK(evaluate(RiskFunctionalSpec::pth_moment(2), Distribution::empirical({1, 2}),
                   1e-10) == doctest::Approx(2.5));
}

TEST_CASE("evaluate: inadmissible law names the missing order") {
    const auto heavy = Distribution::pareto(1, 1.5);
    CHECK_THROWS_WITH_AS(evaluate(RiskFunctionalSpec::pth_moment(2), heavy, 1e-10),
                         doctest::Contains("order 2"), std::domain_error);
}

TEST_CASE("cvar: declared examples and the closed-form minimizer") {
    CHECK(cvar(Distribution::empirical({1, 2, 3, 4}), 0.75, 1e-10) ==
          doctest::Approx(4.0));
    CHECK(cvar(Distribution::dirac(-2.5), 0.3, 1e-10) == doctest::Approx(-2.5));
    CHECK(cvar(Distribution::empirical({1, 2, 3, 4}), 0.5, 1e-10) ==
          doctest::Approx(3.5));
    CHECK_THROWS_AS(cvar(Distribution::dirac(0), 1.5, 1e-10), std::invalid_argument);
}

TEST_CASE("cvar: closed form equals the grid oracle on random laws") {
    RngStream rng(1001);
    for (int t = 0; t < 1000; ++t) {
        const auto xs = random_samples(rng, 40, -10, 10);
        const double tau = rng.next_uniform(0.05, 0.95);
        const double closed = cvar(Distribution::empirical(xs), tau, 1e-12);
        const double oracle = cvar_grid_oracle(xs, tau);
        CHECK(closed == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(closed <= oracle + 1e-12); // the closed form is the true infimum
    }
}

TEST_CASE("cvar: parametric law via the optimization path") {
    // U(0,1): CVaR_tau = (1 + tau) / 2
    CHECK(cvar(Distribution::uniform(0, 1), 0.8, 1e-9) ==
          doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("upper_semideviation: declared examples") {
    CHECK(upper_semideviation(Distribution::empirical({0, 2}), 1e-10) ==
          doctest::Approx(0.5));
    CHECK(upper_semideviation(Distribution::dirac(3.7), 1e-10) == doctest::Approx(0.0));
    CHECK(upper_semideviation(Distribution::empirical({4, 4, 4}), 1e-10) ==
          doctest::Approx(0.0));
}

TEST_CASE("oce_rho: declared examples") {
    RngStream rng(55);
    for (int t = 0; t < 100; ++t) {
        const double c = rng.next_uniform(-20, 20);
        CHECK(oce_rho(Distribution::dirac(c), QuadraticUtility{}, 1e-10) ==
              doctest::Approx(-c).epsilon(1e-9));
        CHECK(oce_rho(Distribution::dirac(c), PiecewiseLinearUtility{0.3, 2.5}, 1e-10) ==
              doctest::Approx(-c).epsilon(1e-9));
    }

    CHECK(oce_rho(Distribution::empirical({0, 1}), QuadraticUtility{}, 1e-10) ==
          doctest::Approx(-0.375).epsilon(1e-10));

    const std::vector<double> xs = {0, 1};
    const Utility pl = PiecewiseLinearUtility{0.0, 2.0};
    CHECK(oce_rho(Distribution::empirical(xs), pl, 1e-10) ==
          doctest::Approx(oce_dense_oracle(xs, pl)).epsilon(1e-8));

    CHECK_THROWS_AS(RiskFunctionalSpec::oce(PiecewiseLinearUtility{1.2, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("oce_rho: grid evaluation matches a dense scan on random laws") {
    RngStream rng(2002);
    for (int t = 0; t < 60; ++t) {
        const auto xs = random_samples(rng, 12, -6, 6);
        for (const Utility& u :
             {Utility(QuadraticUtility{}), Utility(PiecewiseLinearUtility{0.4, 3.0})}) {
            const double got = oce_rho(Distribution::empirical(xs), u, 1e-10);
            const double oracle = oce_dense_oracle(xs, u);
            // both approximate the sup from below; the dense scan's own
            // resolution limits the agreement
            CHECK(got <= oracle + 1e-9);
            CHECK(oracle - got <= 2e-4);
        }
    }
}

TEST_CASE("shortfall_rho: declared examples") {
    CHECK(shortfall_rho(Distribution::empirical({0, 2, 4}), DepositInsuranceLoss{}, 1.0,
                        1e-12) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(shortfall_rho(Distribution::dirac(5), DepositInsuranceLoss{}, 2.0, 1e-12) ==
          doctest::Approx(3.0).epsilon(1e-9));
    CHECK(shortfall_rho(Distribution::empirical({1, 1}), PthPowerLoss{2}, 0.5, 1e-12) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("shortfall_rho: the constraint binds at the solution") {
    RngStream rng(3003);
    const double tol = 1e-11;
    for (int t = 0; t < 1000; ++t) {
        const bool power = rng.next_uniform01() < 0.5;
        const Loss loss = power ? Loss(PthPowerLoss{2}) : Loss(DepositInsuranceLoss{});
        const auto xs = power ? random_samples(rng, 30, 0, 10)
                              : random_samples(rng, 30, -10, 10);
        const double x0 = rng.next_uniform(0.5, 4.0);
        const auto G = Distribution::empirical(xs);
        const double rho = shortfall_rho(G, loss, x0, tol);

        auto constraint = [&](double m) {
            double s = 0.0;
            for (double x : xs) s += loss_value(loss, x - m);
            return s / static_cast<double>(xs.size());
        };
        CHECK(constraint(rho) <= x0 + 1e-7);
        CHECK(constraint(rho - 10 * tol) >= x0 - 1e-7);
    }
}

TEST_CASE("pth_moment: declared examples") {
    const auto e = Distribution::empirical({1, 2});
    CHECK(pth_moment(e, 1, 1e-10) ==
          doctest::Approx(evaluate(RiskFunctionalSpec::expectation(), e, 1e-10)));
    CHECK(pth_moment(e, 2, 1e-10) == doctest::Approx(2.5));
    CHECK(pth_moment(Distribution::uniform(0, 1), 3, 1e-10) ==
          doctest::Approx(0.25).epsilon(1e-8));
    CHECK_THROWS_AS(pth_moment(Distribution::empirical({-1, 2}), 1.5, 1e-10),
                    std::domain_error);
}

TEST_CASE("certificate: declared examples") {
    const auto c1 = certificate(RiskFunctionalSpec::cvar(0.9));
    CHECK(c1.L == doctest::Approx(10.0));
    CHECK(c1.p == 1.0);
    CHECK(c1.iqr == 1.0);

    const auto c2 = certificate(RiskFunctionalSpec::oce(QuadraticUtility{}));
    CHECK(c2.L == 2.0);
    CHECK(c2.p == 2.0);
    CHECK(c2.iqr == 0.5);
    CHECK(c2.conditions.find("xi_min <= -1") != std::string::npos);

    const auto c3 = certificate(RiskFunctionalSpec::shortfall(PthPowerLoss{3}, 1.0));
    CHECK(c3.p == 3.0);
    CHECK(c3.iqr == doctest::Approx(1.0 / 3.0));

    CHECK(certificate(RiskFunctionalSpec::expectation()).L == 1.0);
    CHECK(certificate(RiskFunctionalSpec::upper_semideviation()).L == 2.0);
    CHECK(certificate(RiskFunctionalSpec::oce(PiecewiseLinearUtility{0.5, 2.0})).L ==
          2.0);
    CHECK(certificate(RiskFunctionalSpec::shortfall(DepositInsuranceLoss{}, 1.0)).L ==
          1.0);
    CHECK(certificate(RiskFunctionalSpec::pth_moment(2)).L == 2.0);
}

TEST_CASE("translation equivariance of expectation and cvar") {
    RngStream rng(4004);
    for (int t = 0; t < 200; ++t) {
        const auto xs = random_samples(rng, 25, -5, 5);
        const double c = rng.next_uniform(-10, 10);
        auto shifted = xs;
        for (auto& v : shifted) v += c;
        const double tau = rng.next_uniform(0.1, 0.9);
        CHECK(evaluate(RiskFunctionalSpec::expectation(), Distribution::empirical(shifted),
                       1e-10) ==
              doctest::Approx(evaluate(RiskFunctionalSpec::expectation(),
                                       Distribution::empirical(xs), 1e-10) +
                              c)
                  .epsilon(1e-10));
        CHECK(cvar(Distribution::empirical(shifted), tau, 1e-10) ==
              doctest::Approx(cvar(Distribution::empirical(xs), tau, 1e-10) + c)
                  .epsilon(1e-10));
    }
}

TEST_CASE("monotonicity under samplewise domination") {
    RngStream rng(5005);
    for (int t = 0; t < 200; ++t) {
        const auto xs = random_samples(rng, 20, -5, 5);
        auto dominated = xs;
        auto dominating = xs;
        for (auto& v : dominating) v += rng.next_uniform(0, 2);
        const double tau = rng.next_uniform(0.1, 0.9);
        const auto lo = Distribution::empirical(dominated);
        const auto hi = Distribution::empirical(dominating);
        CHECK(evaluate(RiskFunctionalSpec::expectation(), lo, 1e-10) <=
              evaluate(RiskFunctionalSpec::expectation(), hi, 1e-10) + 1e-12);
        CHECK(cvar(lo, tau, 1e-10) <= cvar(hi, tau, 1e-10) + 1e-12);
        CHECK(shortfall_rho(lo, DepositInsuranceLoss{}, 1.0, 1e-11) <=
              shortfall_rho(hi, DepositInsuranceLoss{}, 1.0, 1e-11) + 1e-8);
    }
}

TEST_CASE("cvar dominates the mean and grows with the level") {
    RngStream rng(6006);
    for (int t = 0; t < 200; ++t) {
        const auto xs = random_samples(rng, 20, -8, 8);
        const auto G = Distribution::empirical(xs);
        const double mean = evaluate(RiskFunctionalSpec::expectation(), G, 1e-10);
        double prev = mean;
        for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
            const double cv = cvar(G, tau, 1e-10);
            CHECK(cv >= mean - 1e-10);
            CHECK(cv >= prev - 1e-10);
            prev = cv;
        }
    }
}
