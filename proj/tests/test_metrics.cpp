#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qrob/metrics.hpp"
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

} // namespace

TEST_CASE("kantorovich: declared examples") {
    CHECK(kantorovich(Distribution::dirac(0), Distribution::dirac(1), 1e-9).value ==
          doctest::Approx(1.0));
    const auto mv = kantorovich(Distribution::empirical({0, 1}),
                                Distribution::empirical({0, 2}), 1e-9);
    CHECK(mv.value == doctest::Approx(0.5));
    CHECK(mv.exactness == MetricValue::Exactness::Exact);
    CHECK(kantorovich(Distribution::uniform(0, 1), Distribution::uniform(0, 1.1), 1e-9)
              .value == doctest::Approx(0.05).epsilon(1e-7));
}

TEST_CASE("kantorovich: heavy tail below first moment returns the sentinel") {
    const auto mv =
        kantorovich(Distribution::pareto(1, 0.9), Distribution::dirac(0), 1e-9);
    CHECK(mv.is_infinite());
}

TEST_CASE("fortet_mourier: declared examples") {
    CHECK(fortet_mourier(Distribution::dirac(0), Distribution::dirac(2), 2.0, 1e-9)
              .value == doctest::Approx(2.5));
    const auto same = Distribution::empirical({-1, 0.5, 3});
    CHECK(fortet_mourier(same, same, 2.0, 1e-9).value == 0.0);
    CHECK(fortet_mourier(Distribution::empirical({0, 1}),
                         Distribution::empirical({0, 2}), 1.0, 1e-9)
              .value == doctest::Approx(0.5));
    CHECK_THROWS_AS(fortet_mourier(same, same, 0.5, 1e-9), std::invalid_argument);
}

TEST_CASE("kolmogorov: declared examples") {
    CHECK(kolmogorov(Distribution::dirac(0), Distribution::dirac(1)).value ==
          doctest::Approx(1.0));
    CHECK(kolmogorov(Distribution::empirical({0, 1}), Distribution::empirical({0, 2}))
              .value == doctest::Approx(0.5));
    const auto same = Distribution::empirical({1, 2, 3});
    CHECK(kolmogorov(same, same).value == 0.0);
}

TEST_CASE("kolmogorov: continuous pair by grid refinement") {
    // F(x) = x vs x/1.1 on the overlap; the gap peaks at x = 1
    const auto mv = kolmogorov(Distribution::uniform(0, 1), Distribution::uniform(0, 1.1));
    CHECK(mv.value == doctest::Approx(1.0 - 1.0 / 1.1).epsilon(1e-7));
}

TEST_CASE("weighted_kolmogorov: declared examples") {
    const auto p = Distribution::empirical({0, 1});
    const auto q = Distribution::empirical({0.4, 2});
    const auto flat = GaugeFunction::max_one_pow(0);
    CHECK(weighted_kolmogorov(p, q, flat).value ==
          doctest::Approx(kolmogorov(p, q).value));

    CHECK(weighted_kolmogorov(Distribution::dirac(0), Distribution::dirac(2),
                              GaugeFunction::max_one_pow(2))
              .value == doctest::Approx(4.0));

    CHECK(weighted_kolmogorov(p, p, GaugeFunction::max_one_pow(2)).value == 0.0);

    CHECK_THROWS_AS(weighted_kolmogorov(p, q, GaugeFunction::abs_pow(2)),
                    std::invalid_argument);
}

TEST_CASE("weighted_kolmogorov: diverging tail yields the sentinel") {
    const auto mv = weighted_kolmogorov(Distribution::pareto(1, 1.5),
                                        Distribution::dirac(0),
                                        GaugeFunction::max_one_pow(2));
    CHECK(mv.is_infinite());
}

TEST_CASE("levy: declared examples") {
    CHECK(levy(Distribution::dirac(0), Distribution::dirac(0.5), 1e-6).value ==
          doctest::Approx(0.5).epsilon(1e-5));
    const auto same = Distribution::empirical({0, 2, 5});
    CHECK(levy(same, same, 1e-9).value == doctest::Approx(0.0));

    RngStream rng(31337);
    for (int t = 0; t < 20; ++t) {
        const auto a = Distribution::empirical(random_samples(rng, 20, -50, 50));
        const auto b = Distribution::empirical(random_samples(rng, 20, -50, 50));
        CHECK(levy(a, b, 1e-6).value <= 1.0 + 1e-12);
    }
    CHECK(levy(Distribution::normal(0, 1), Distribution::uniform(-40, 40), 1e-5).value <=
          1.0 + 1e-12);
}

TEST_CASE("prokhorov: declared examples") {
    const EmpiricalDistribution single0({0.0});
    const EmpiricalDistribution single05({0.5});
    const auto mv = prokhorov(single0, single05, 1e-9);
    CHECK(mv.value == doctest::Approx(0.5));
    CHECK(mv.exactness == MetricValue::Exactness::Exact);

    const EmpiricalDistribution same({1, 2, 3});
    CHECK(prokhorov(same, same, 1e-9).value == 0.0);

    CHECK_THROWS_AS(prokhorov(EmpiricalDistribution({1}), EmpiricalDistribution({1, 2}),
                              1e-9),
                    std::invalid_argument);
}

TEST_CASE("prokhorov: squared value is dominated by kantorovich") {
    RngStream rng(4242);
    for (int t = 0; t < 60; ++t) {
        auto xs = random_samples(rng, 30, -5, 5);
        auto ys = random_samples(rng, 30, -5, 5);
        ys.resize(xs.size(), 0.0);
        for (auto& v : ys)
            if (v == 0.0) v = rng.next_uniform(-5, 5);
        const auto P = Distribution::empirical(xs);
        const auto Q = Distribution::empirical(ys);
        const double dp = prokhorov(EmpiricalDistribution(xs), EmpiricalDistribution(ys),
                                    1e-9)
                              .value;
        const double dk = kantorovich(P, Q, 1e-9).value;
        CHECK(dp * dp <= dk + 1e-9);
    }
}

TEST_CASE("prokhorov: general pairs fall back to the kantorovich bracket") {
    const auto mv =
        prokhorov(Distribution::uniform(0, 1), Distribution::uniform(0.2, 1.2), 1e-9);
    CHECK(mv.exactness == MetricValue::Exactness::Bracket);
    CHECK(mv.lo == 0.0);
    CHECK(mv.hi == doctest::Approx(std::sqrt(0.2)).epsilon(1e-6));
}

TEST_CASE("d_phi: declared examples") {
    const auto same = Distribution::empirical({0, 1, 4});
    CHECK(d_phi(same, same, GaugeFunction::abs_pow(1), 1e-10).value == 0.0);

    CHECK(d_phi(Distribution::empirical({0.0}), Distribution::empirical({0.5}),
                GaugeFunction::abs_pow(1), 1e-10)
              .value == doctest::Approx(1.0));

    // bounded gauge keeps the moment gap below twice its sup
    const auto table = GaugeFunction::u_shaped_table({-1, 0, 1}, {3, 3, 3});
    const auto a = Distribution::empirical({-2, 0, 7});
    const auto b = Distribution::empirical({1, 1, 30});
    const auto mv = d_phi(a, b, table, 1e-10);
    CHECK(mv.value - prokhorov(EmpiricalDistribution({-2, 0, 7}),
                               EmpiricalDistribution({1, 1, 30}), 1e-10)
                         .value <=
          2.0 * 3.0 + 1e-12);
}

TEST_CASE("bl_bracket: declared examples") {
    const EmpiricalDistribution same({2, 3});
    const auto zero = bl_bracket(same, same, 1e-9);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == 0.0);

    const auto mv = bl_bracket(EmpiricalDistribution({0.0}), EmpiricalDistribution({0.5}),
                               1e-9);
    CHECK(mv.lo == doctest::Approx(2.0 / 3.0 * 0.25));
    CHECK(mv.hi == doctest::Approx(1.0));

    RngStream rng(5550123);
    for (int t = 0; t < 40; ++t) {
        const auto xs = random_samples(rng, 15, -3, 3);
        auto ys = xs;
        for (auto& v : ys) v += rng.next_uniform(-1, 1);
        const auto b = bl_bracket(EmpiricalDistribution(xs), EmpiricalDistribution(ys),
                                  1e-9);
        CHECK(b.lo <= b.hi + 1e-15);
    }
}

TEST_CASE("metric axioms on random empirical pairs") {
    RngStream rng(90210);
    for (int t = 0; t < 1000; ++t) {
        const auto xs = random_samples(rng, 12, -8, 8);
        const auto ys = random_samples(rng, 12, -8, 8);
        const auto zs = random_samples(rng, 12, -8, 8);
        const auto P = Distribution::empirical(xs);
        const auto Q = Distribution::empirical(ys);
        const auto R = Distribution::empirical(zs);

        for (double p : {1.0, 1.5, 2.0}) {
            const double pq = fortet_mourier(P, Q, p, 1e-9).value;
            const double qp = fortet_mourier(Q, P, p, 1e-9).value;
            const double pr = fortet_mourier(P, R, p, 1e-9).value;
            const double qr = fortet_mourier(Q, R, p, 1e-9).value;
            CHECK(std::abs(pq - qp) <= 1e-12 * (1.0 + pq));
            CHECK(fortet_mourier(P, P, p, 1e-9).value == 0.0);
            CHECK(pr <= pq + qr + 1e-9);
        }
        const double kpq = kolmogorov(P, Q).value;
        CHECK(std::abs(kpq - kolmogorov(Q, P).value) <= 1e-12);
        CHECK(kolmogorov(P, R).value <= kpq + kolmogorov(Q, R).value + 1e-12);
    }
}

TEST_CASE("fortet_mourier tightens as the order grows") {
    RngStream rng(777);
    for (int t = 0; t < 300; ++t) {
        const auto P = Distribution::empirical(random_samples(rng, 25, -6, 6));
        const auto Q = Distribution::empirical(random_samples(rng, 25, -6, 6));
        const double k = kantorovich(P, Q, 1e-9).value;
        double prev = k;
        for (double p : {1.0, 1.5, 2.0, 3.0}) {
            const double v = fortet_mourier(P, Q, p, 1e-9).value;
            CHECK(v >= prev - 1e-10);
            CHECK(v >= k - 1e-10);
            prev = v;
        }
    }
}

TEST_CASE("d_phi with the order gauge obeys the root-plus-linear bound") {
    RngStream rng(2025);
    for (int t = 0; t < 200; ++t) {
        const auto n = static_cast<std::size_t>(1 + rng.next_uniform01() * 20);
        std::vector<double> xs(n), ys(n);
        for (auto& v : xs) v = rng.next_uniform(-5, 5);
        for (auto& v : ys) v = rng.next_uniform(-5, 5);
        const auto P = Distribution::empirical(xs);
        const auto Q = Distribution::empirical(ys);
        for (double p : {1.0, 2.0}) {
            const double fm = fortet_mourier(P, Q, p, 1e-9).value;
            const double dw = d_phi(P, Q, GaugeFunction::phi_p(p), 1e-10).value;
            CHECK(dw <= std::sqrt(fm) + p * fm + 1e-9);
        }
    }
}

TEST_CASE("closed form matches dense quadrature on step pairs") {
    RngStream rng(86);
    const double tol = 1e-9;
    for (int t = 0; t < 50; ++t) {
        const auto P = Distribution::empirical(random_samples(rng, 20, -4, 4));
        const auto Q = Distribution::empirical(random_samples(rng, 20, -4, 4));
        for (double p : {1.0, 1.5, 2.0}) {
            const double exact = fortet_mourier(P, Q, p, tol).value;
            const double quad = fortet_mourier_quadrature(P, Q, p, tol).value;
            CHECK(std::abs(exact - quad) <= 10 * tol);
        }
    }
}
