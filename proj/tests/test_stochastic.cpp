#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "offload/stochastic.hpp"

using namespace offload;

namespace {

// Textbook recurrence in long double: tail = 1 - sum_{i<k} e^-l l^i / i!.
long double naive_tail(double lambda, int k) {
    long double term = std::exp(-static_cast<long double>(lambda));
    long double cdf = 0.0L;
    for (int i = 0; i < k; ++i) {
        cdf += term;
        term *= lambda / static_cast<long double>(i + 1);
    }
    return 1.0L - cdf;
}

// Upper-tail sum in long double, for tails too small for 1 - cdf.
long double naive_upper_tail(double lambda, int k) {
    long double term = std::exp(-static_cast<long double>(lambda));
    for (int i = 0; i < k; ++i) term *= lambda / static_cast<long double>(i + 1);
    long double sum = 0.0L;
    for (int i = k; i < k + 400; ++i) {
        sum += term;
        term *= lambda / static_cast<long double>(i + 1);
    }
    return sum;
}

PoissonMean pm(double v) { return PoissonMean(v); }

}  // namespace

TEST_CASE("PoissonMean rejects non-positive and non-finite values") {
    CHECK_THROWS_AS(PoissonMean(0.0), std::domain_error);
    CHECK_THROWS_AS(PoissonMean(-1.0), std::domain_error);
    CHECK_THROWS_AS(PoissonMean(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(PoissonMean(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK(PoissonMean(1e-300).value() == 1e-300);
}

TEST_CASE("tail reference values") {
    CHECK(poisson_tail(pm(5), 0) == 1.0);
    CHECK(poisson_tail(pm(1), 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(poisson_tail(pm(2), 3) > poisson_tail(pm(1), 3));
    CHECK(poisson_tail(pm(2), 3) == doctest::Approx(1.0 - 5.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(poisson_tail(pm(1), -1), std::domain_error);
}

TEST_CASE("tail matches long double summation") {
    for (double lambda : {0.01, 0.5, 1.0, 3.7, 10.0, 42.0, 120.0, 160.0, 200.0}) {
        const int top = static_cast<int>(lambda * 2 + 40);
        for (int k = 0; k <= top; ++k) {
            const double got = poisson_tail(pm(lambda), k);
            const long double upper = naive_upper_tail(lambda, k);
            if (upper > 0.5L) {
                CHECK(std::fabs(got - static_cast<double>(naive_tail(lambda, k))) < 1e-13);
            } else if (upper > 1e-300L) {
                CHECK(std::fabs(got / static_cast<double>(upper) - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("deep tails keep relative precision") {
    // Far beyond 1 - cdf resolution: tail(1, 30) ~ 1e-33.
    const double t = poisson_tail(pm(1), 30);
    CHECK(t > 0.0);
    CHECK(t / static_cast<double>(naive_upper_tail(1, 30)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(poisson_tail(pm(0.5), 500) >= 0.0);
}

TEST_CASE("tails vector agrees with scalar calls") {
    const auto v = poisson_tails(pm(7.5), 40);
    REQUIRE(v.size() == 41);
    for (int k = 0; k <= 40; ++k) CHECK(v[k] == doctest::Approx(poisson_tail(pm(7.5), k)).epsilon(1e-14));
}

TEST_CASE("pmf and tail are complementary") {
    for (double lambda : {0.3, 4.0, 25.0}) {
        for (int k = 0; k < 60; ++k) {
            const double diff = poisson_tail(pm(lambda), k) - poisson_tail(pm(lambda), k + 1);
            CHECK(std::fabs(diff - poisson_pmf(pm(lambda), k)) < 1e-13);
        }
    }
}

TEST_CASE("utility reference values") {
    CHECK(uav_utility(pm(7), 0) == 0.0);
    CHECK(uav_utility(pm(1), 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(std::fabs(uav_utility(pm(4), 50) - 4.0) < 1e-9);
    CHECK_THROWS_AS(uav_utility(pm(1), -1), std::domain_error);
    const auto curve = utility_curve(pm(3), 10);
    REQUIRE(curve.size() == 11);
    for (int w = 0; w <= 10; ++w) CHECK(curve[w] == doctest::Approx(uav_utility(pm(3), w)).epsilon(1e-14));
}

TEST_CASE("cost reference values") {
    CHECK(mbs_cost(0, 200, pm(120)) == 0.0);
    double top = 0.0;
    for (int k = 191; k <= 200; ++k) top += static_cast<double>(naive_upper_tail(160, k));
    CHECK(mbs_cost(10, 200, pm(160)) == doctest::Approx(top).epsilon(1e-10));
    double all = 0.0;
    for (int k = 1; k <= 30; ++k) all += poisson_tail(pm(9), k);
    CHECK(mbs_cost(30, 30, pm(9)) == doctest::Approx(all).epsilon(1e-14));
    CHECK_THROWS_AS(mbs_cost(11, 10, pm(5)), std::domain_error);
    CHECK_THROWS_AS(mbs_cost(-1, 10, pm(5)), std::domain_error);
    const auto curve = cost_curve(20, pm(12));
    REQUIRE(curve.size() == 21);
    for (int m = 0; m <= 20; ++m) CHECK(curve[m] == doctest::Approx(mbs_cost(m, 20, pm(12))).epsilon(1e-13));
}

TEST_CASE("saturation count") {
    const int k = saturation_count(pm(10));
    CHECK(poisson_tail(pm(10), k) < 1e-12);
    CHECK(poisson_tail(pm(10), k - 1) >= 1e-12);
    CHECK(saturation_count(pm(3), 2.0) == 0);
    CHECK(saturation_count(pm(3), 1.0) == 1);
}

// Property suites below run at least 500 cases each with fixed seeds.

TEST_CASE("property: tail strictly increasing in the mean") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> mean(0.1, 50.0);
    std::uniform_real_distribution<double> shrink(0.05, 0.95);
    int cases = 0, strict = 0;
    for (; cases < 2000; ++cases) {
        const double hi = mean(rng);
        const double lo = hi * shrink(rng);
        const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(hi + 30));
        const double a = poisson_tail(pm(hi), k), b = poisson_tail(pm(lo), k);
        CHECK(a >= b);
        // Strict once the gap is above double resolution near 1.
        if (b < 1.0 - 1e-12) {
            CHECK(a > b);
            ++strict;
        }
    }
    CHECK(strict >= 500);
}

TEST_CASE("property: utility increasing with negative second difference") {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> mean(0.1, 30.0);
    for (int n = 0; n < 1000; ++n) {
        const double lambda = mean(rng);
        // Below saturation, where increments are representable.
        const int w = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(saturation_count(pm(lambda))));
        const double u0 = uav_utility(pm(lambda), w - 1);
        const double u1 = uav_utility(pm(lambda), w);
        const double u2 = uav_utility(pm(lambda), w + 1);
        CHECK(u1 > u0);
        CHECK(u2 - 2 * u1 + u0 < 0.0);
        CHECK(std::fabs((u2 - 2 * u1 + u0) + poisson_pmf(pm(lambda), w)) < 1e-12);
        CHECK(uav_utility(pm(lambda * 1.5), w) > u1);
    }
}

TEST_CASE("property: increasing preference") {
    // U(lb, w) - U(lb, w') > U(la, w) - U(la, w') for lb > la, w > w'.
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> mean(0.2, 20.0);
    std::uniform_real_distribution<double> shrink(0.05, 0.9);
    for (int n = 0; n < 1000; ++n) {
        const double lb = mean(rng);
        const double la = lb * shrink(rng);
        const int w_lo = static_cast<int>(rng() % 25);
        const int w_hi = w_lo + 1 + static_cast<int>(rng() % 10);
        if (poisson_tail(pm(lb), w_lo + 1) < 1e-10) continue;
        const double db = uav_utility(pm(lb), w_hi) - uav_utility(pm(lb), w_lo);
        const double da = uav_utility(pm(la), w_hi) - uav_utility(pm(la), w_lo);
        CHECK(db > da);
    }
}

TEST_CASE("property: saturated utility equals the mean") {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> mean(0.01, 60.0);
    for (int n = 0; n < 600; ++n) {
        const double lambda = mean(rng);
        const int w = saturation_count(pm(lambda));
        CHECK(std::fabs(uav_utility(pm(lambda), w) - lambda) < 1e-9);
        CHECK(std::fabs(uav_utility(pm(lambda), w + 25) - lambda) < 1e-9);
    }
}

TEST_CASE("property: cost convex and bounded by the mean") {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> mean(1.0, 200.0);
    for (int n = 0; n < 500; ++n) {
        const double load = mean(rng);
        const int total = 1 + static_cast<int>(rng() % 250);
        const auto c = cost_curve(total, pm(load));
        for (int m = 1; m <= total; ++m) CHECK(c[m] >= c[m - 1]);
        for (int m = 2; m <= total; ++m) CHECK(c[m] - 2 * c[m - 1] + c[m - 2] >= -1e-12);
        CHECK(c[total] <= load + 1e-9);
    }
}
