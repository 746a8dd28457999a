#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qrob/numerics.hpp"
#include "qrob/rng.hpp"

using namespace qrob;

TEST_CASE("integrate: declared examples") {
    CHECK(integrate([](double) { return 1.0; }, Interval(0, 1), 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> kink = {1.0};
    CHECK(integrate([](double x) { return std::max(1.0, x); }, Interval(0, 2), 1e-9,
                    kink) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(integrate([](double x) { return x * x; }, Interval(-1, 1), 1e-9) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("integrate: piecewise polynomial suite stays within tolerance") {
    // 20 integrands with closed-form antiderivatives, kinks declared
    struct Case {
        std::function<double(double)> f;
        double lo, hi, exact;
        std::vector<double> kinks;
    };
    std::vector<Case> cases;
    for (int k = 0; k < 10; ++k) {
        const double c = -2.0 + 0.5 * k;
        // |x - c| on [-3, 3]: antiderivative pieces (c-x)^2/2 and (x-c)^2/2
        const double lo = -3, hi = 3;
        const double exact = 0.5 * ((c - lo) * (c - lo) + (hi - c) * (hi - c));
        cases.push_back({[c](double x) { return std::abs(x - c); }, lo, hi, exact, {c}});
    }
    for (int k = 1; k <= 10; ++k) {
        // x^k on [0, 2]
        const double exact = std::pow(2.0, k + 1) / (k + 1);
        cases.push_back({[k](double x) { return std::pow(x, k); }, 0, 2, exact, {}});
    }
    REQUIRE(cases.size() == 20);
    const double tol = 1e-10;
    for (const auto& c : cases) {
        const double got = integrate(c.f, Interval(c.lo, c.hi), tol, c.kinks);
        CHECK(std::abs(got - c.exact) <= tol);
    }
}

TEST_CASE("integrate: non-finite integrand raises") {
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, Interval(-1, 1), 1e-6),
                    std::domain_error);
}

TEST_CASE("bisect_root: declared examples") {
    CHECK(bisect_root([](double m) { return m - 1.0; }, Interval(0, 2), 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-10));
    auto g = [](double m) {
        return (std::max(2.0 - m, 0.0) + std::max(4.0 - m, 0.0)) / 3.0 - 1.0;
    };
    CHECK(bisect_root(g, Interval(0, 4), 1e-12) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(bisect_root([](double m) { return std::exp(m) - 1.0; }, Interval(-1, 1),
                      1e-12) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("bisect_root: missing sign change raises") {
    CHECK_THROWS_AS(
        bisect_root([](double m) { return m * m + 1.0; }, Interval(-1, 1), 1e-9),
        std::invalid_argument);
}

TEST_CASE("grid_minimize: declared examples") {
    // tail-average objective; flat minimum reached at the top sample
    auto cvar_obj = [](double r) {
        double s = r;
        for (double xi : {1.0, 2.0, 3.0, 4.0}) s += std::max(0.0, xi - r);
        return s;
    };
    CHECK(grid_minimize(cvar_obj, Interval(1, 4)).min ==
          doctest::Approx(4.0).epsilon(1e-9));

    const auto quad = grid_minimize([](double x) { return (x - 2) * (x - 2); },
                                    Interval(0, 4));
    CHECK(quad.argmin == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(quad.min == doctest::Approx(0.0).epsilon(1e-12));

    auto u = [](double t) { return t < 1.0 ? t - 0.5 * t * t : 0.5; };
    auto oce_obj = [&](double eta) {
        return -(eta + 0.5 * (u(-eta) + u(1.0 - eta)));
    };
    CHECK(grid_minimize(oce_obj, Interval(-1, 2)).min ==
          doctest::Approx(-0.375).epsilon(1e-10));
}

TEST_CASE("sorted_pairing_cost: declared examples") {
    const std::vector<double> v = {3.0, -1.0, 2.0};
    CHECK(sorted_pairing_cost(v, v, 2.0) == 0.0);
    CHECK(sorted_pairing_cost(std::vector<double>{0, 1}, std::vector<double>{0, 2},
                              1.0) == doctest::Approx(0.5));
    CHECK(sorted_pairing_cost(std::vector<double>{0, 3}, std::vector<double>{0, 2},
                              2.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(
        sorted_pairing_cost(std::vector<double>{1}, std::vector<double>{1, 2}, 1.0),
        std::invalid_argument);
}

TEST_CASE("min_over_permutations: declared examples") {
    CHECK(min_over_permutations(std::vector<double>{1, 2}, std::vector<double>{2, 1}) ==
          0.0);
    CHECK(min_over_permutations(std::vector<double>{0, 1}, std::vector<double>{0, 2}) ==
          doctest::Approx(1.0));
    CHECK(min_over_permutations(std::vector<double>{0, 5, 6},
                                std::vector<double>{1, 2, 9}) == doctest::Approx(7.0));
    std::vector<double> big(10, 0.0);
    CHECK_THROWS_AS(min_over_permutations(big, big), std::invalid_argument);
}

TEST_CASE("permutation oracle matches the sorted pairing") {
    RngStream rng(20240811);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = static_cast<std::size_t>(1 + rng.next_uniform01() * 8);
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = rng.next_uniform(-5, 5);
        for (auto& v : b) v = rng.next_uniform(-5, 5);
        const double oracle = min_over_permutations(a, b);
        const double sorted = static_cast<double>(n) * sorted_pairing_cost(a, b, 1.0);
        CHECK(oracle == doctest::Approx(sorted).epsilon(1e-12));
    }
}

TEST_CASE("similarly sorted products dominate the unsorted sum") {
    RngStream rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(2 + rng.next_uniform01() * 12);
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = rng.next_uniform(-4, 4);
        for (auto& v : b) v = rng.next_uniform(0, 3); // non-negative
        double plain = 0.0;
        for (std::size_t i = 0; i < n; ++i) plain += a[i] * b[i];
        std::vector<double> as = a, bs = b;
        std::sort(as.begin(), as.end());
        std::sort(bs.begin(), bs.end());
        double sorted = 0.0;
        for (std::size_t i = 0; i < n; ++i) sorted += as[i] * bs[i];
        CHECK(plain <= sorted + 1e-12);
    }
}

TEST_CASE("coupling_feasible: declared examples") {
    const std::vector<double> x = {0.0, 1.0, 2.0};
    CHECK(coupling_feasible(x, x, 0.0));
    CHECK_FALSE(coupling_feasible(std::vector<double>{0.0}, std::vector<double>{0.5},
                                  0.4));
    CHECK(coupling_feasible(std::vector<double>{0.0}, std::vector<double>{0.5}, 0.5));
    CHECK_THROWS_AS(
        coupling_feasible(std::vector<double>{1}, std::vector<double>{1, 2}, 0.1),
        std::invalid_argument);
}

TEST_CASE("coupling_feasible: slack budget admits unmatched points") {
    // two far-apart points out of ten; floor(0.2 * 10) = 2 may go unmatched
    std::vector<double> x = {0, 1, 2, 3, 4, 5, 6, 7, 100, 200};
    std::vector<double> y = {0, 1, 2, 3, 4, 5, 6, 7, -100, -200};
    CHECK_FALSE(coupling_feasible(x, y, 0.1));
    CHECK(coupling_feasible(x, y, 0.2));
}

TEST_CASE("rng streams reproduce bitwise and separate by id") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 10000; ++i) {
        const auto va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);

    RngStream u(9001, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.next_uniform01();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}
