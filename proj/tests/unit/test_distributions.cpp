#include "oracles.hpp"

#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"
#include "xformtest/random.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numbers>

using namespace xformtest;
using Catch::Approx;

TEST_CASE("incomplete gamma edge values", "[distributions]") {
    CHECK(reg_inc_gamma_lower(0.5, 0.0) == 0.0);
    CHECK(std::fabs(reg_inc_gamma_lower(0.5, 1e9) - 1.0) < 1e-12);
    CHECK(reg_inc_gamma_upper(0.5, 0.0) == 1.0);
    CHECK_THROWS_AS(reg_inc_gamma_lower(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(reg_inc_gamma_lower(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(reg_inc_gamma_lower(1.0, -0.1), DomainError);
}

TEST_CASE("incomplete gamma matches a long-double series", "[distributions]") {
    CHECK(std::fabs(reg_inc_gamma_lower(0.5, 0.5) - static_cast<double>(oracle::inc_gamma_series(0.5L, 0.5L))) <
          1e-12);
    for (double s : {0.5, 1.0, 1.5, 2.5, 7.0, 20.0}) {
        for (double x = 0.05; x < 40.0; x *= 1.3) {
            const double expected = static_cast<double>(oracle::inc_gamma_series(s, x));
            INFO("s=" << s << " x=" << x);
            CHECK(std::fabs(reg_inc_gamma_lower(s, x) - expected) < 1e-12);
            CHECK(std::fabs(reg_inc_gamma_upper(s, x) - (1.0 - expected)) < 1e-12);
        }
    }
}

TEST_CASE("chi2_cdf matches the erf series on a dense grid", "[distributions]") {
    CHECK(chi2_cdf(0.0) == 0.0);
    double worst = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        const double x = 50.0 * i / 5000.0;
        worst = std::max(worst, std::fabs(chi2_cdf(x) - static_cast<double>(oracle::chi2_1_cdf(x))));
    }
    CHECK(worst < 1e-10);
    CHECK_THROWS_AS(chi2_cdf(-1.0), DomainError);
}

TEST_CASE("chi2_cdf is monotone on [0, 50]", "[distributions]") {
    double prev = chi2_cdf(0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double cur = chi2_cdf(50.0 * i / 10000.0);
        REQUIRE(cur >= prev);
        prev = cur;
    }
    CHECK(prev > 1.0 - 1e-11);
}

TEST_CASE("chi2_quantile", "[distributions]") {
    const double q95 = chi2_quantile(0.95);
    CHECK(std::fabs(q95 - 3.841459) < 1e-5);
    CHECK(std::fabs(chi2_cdf(q95) - 0.95) < 1e-10);
    CHECK(std::fabs(chi2_cdf(3.841459) - 0.95) < 1e-6);

    const double bisected = oracle::bisect([](double x) { return oracle::chi2_1_cdf(x); }, 0.5, 0.0, 50.0);
    CHECK(std::fabs(chi2_quantile(0.5) - bisected) < 1e-9);
    CHECK(std::fabs(chi2_cdf(chi2_quantile(0.5)) - 0.5) < 1e-10);

    double prev = 0.0;
    for (int i = 1; i <= 99; ++i) {
        const double p = i / 100.0;
        const double q = chi2_quantile(p);
        CHECK(std::fabs(chi2_cdf(q) - p) < 1e-10);
        CHECK(q > prev);
        prev = q;
    }
    CHECK_THROWS_AS(chi2_quantile(0.0), DomainError);
    CHECK_THROWS_AS(chi2_quantile(1.0), DomainError);
}

TEST_CASE("noncentral chi2 reduces to the central law", "[distributions]") {
    for (double x = 0.0; x < 30.0; x += 0.37) {
        CHECK(std::fabs(noncentral_chi2_cdf(0.0, x) - chi2_cdf(x)) < 1e-12);
    }
    CHECK(noncentral_chi2_cdf(2.0, 0.0) == 0.0);
    CHECK_THROWS_AS(noncentral_chi2_cdf(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(noncentral_chi2_cdf(1.0, -1.0), DomainError);
    NoncentralChiSquared1 d(0.0);
    CHECK(d.cdf(1.5) == Approx(chi2_cdf(1.5)).margin(1e-12));
}

TEST_CASE("noncentral chi2 closed form for one degree of freedom", "[distributions]") {
    // (Z + mu)^2 <= x  iff  -sqrt(x) - mu <= Z <= sqrt(x) - mu.
    for (double lambda : {0.1, 1.0, 2.0, 10.0, 50.0}) {
        const long double mu = std::sqrt(static_cast<long double>(lambda));
        for (double x = 0.1; x < 80.0; x *= 1.5) {
            const long double r = std::sqrt(static_cast<long double>(x));
            const long double expected = oracle::normal_cdf(r - mu) - oracle::normal_cdf(-r - mu);
            INFO("lambda=" << lambda << " x=" << x);
            CHECK(std::fabs(noncentral_chi2_cdf(lambda, x) - static_cast<double>(expected)) < 1e-10);
        }
    }
}

TEST_CASE("noncentral chi2 against Monte Carlo", "[distributions][slow]") {
    Rng rng(20240607);
    const double mu = std::sqrt(2.0);
    const int draws = 10000000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
        const double z = normal_sample(rng) + mu;
        hits += z * z <= 3.84 ? 1 : 0;
    }
    const double p_hat = static_cast<double>(hits) / draws;
    const double p = noncentral_chi2_cdf(2.0, 3.84);
    const double se = std::sqrt(p * (1.0 - p) / draws);
    CHECK(std::fabs(p_hat - p) < 3.0 * se);
}

TEST_CASE("noncentral chi2 is stochastically larger", "[distributions]") {
    for (double lambda : {0.01, 0.5, 3.0, 25.0}) {
        for (double x = 0.05; x < 60.0; x *= 1.4) {
            CHECK(noncentral_chi2_cdf(lambda, x) <= chi2_cdf(x));
        }
    }
}

TEST_CASE("normal cdf against the erf series", "[distributions]") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(std::fabs(normal_cdf(1.959964) - 0.975) < 1e-6);
    double worst = 0.0;
    for (int i = -8000; i <= 8000; ++i) {
        const double x = i / 1000.0;
        worst = std::max(worst, std::fabs(normal_cdf(x) - static_cast<double>(oracle::normal_cdf(x))));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("normal cdf symmetry", "[distributions]") {
    for (double x = -9.0; x <= 9.0; x += 0.013) {
        CHECK(std::fabs(normal_cdf(-x) + normal_cdf(x) - 1.0) < 1e-14);
    }
}

TEST_CASE("normal quantile inverts the cdf on [-5, 5]", "[distributions]") {
    for (int i = -500; i <= 500; ++i) {
        const double x = i / 100.0;
        INFO("x=" << x);
        CHECK(std::fabs(normal_quantile(normal_cdf(x)) - x) < 1e-8);
    }
    CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("normal quantile inverts the cdf on [-6, 6] within 1e-9", "[distributions]") {
    double worst = 0.0;
    double worst_x = 0.0;
    for (int i = -600; i <= 600; ++i) {
        const double x = i / 100.0;
        const double err = std::fabs(normal_quantile(normal_cdf(x)) - x);
        if (err > worst) {
            worst = err;
            worst_x = x;
        }
    }
    INFO("worst error " << worst << " at x=" << worst_x);
    CHECK(worst < 1e-9);
}

TEST_CASE("normal sampling", "[distributions]") {
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = normal_sample(a);
        const double v = normal_sample(b);
        REQUIRE(std::memcmp(&u, &v, sizeof u) == 0);
    }
    Rng rng(123);
    double sum = 0.0;
    double sum2 = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double z = normal_sample(rng);
        sum += z;
        sum2 += z * z;
    }
    CHECK(std::fabs(sum / n) < 0.005);
    CHECK(std::fabs(sum2 / n - 1.0) < 0.01);
}

TEST_CASE("normal pdf", "[distributions]") {
    CHECK(StdNormal::pdf(0.0) == Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(StdNormal::pdf(1.3) == Approx(StdNormal::pdf(-1.3)).epsilon(1e-15));
}
