#include "oracles.hpp"

#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"
#include "xformtest/kde.hpp"
#include "xformtest/random.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

using namespace xformtest;
using Catch::Approx;

namespace {

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

TEST_CASE("quartic kernel values", "[kde]") {
    CHECK(quartic_kernel(0.0) == 0.9375);
    CHECK(quartic_kernel(1.0) == 0.0);
    CHECK(quartic_kernel(-1.0) == 0.0);
    CHECK(quartic_kernel(2.5) == 0.0);
    for (double u = 0.0; u < 1.0; u += 0.01) {
        CHECK(quartic_kernel(u) == quartic_kernel(-u));
        CHECK(quartic_kernel(u) >= 0.0);
    }
    static_assert(quartic_kernel(0.0) == 0.9375);
}

TEST_CASE("quartic kernel integrates to one", "[kde]") {
    const int steps = 1000000;
    const double width = 2.0 / steps;
    double sum = 0.5 * (quartic_kernel(-1.0) + quartic_kernel(1.0));
    for (int i = 1; i < steps; ++i) {
        sum += quartic_kernel(-1.0 + i * width);
    }
    CHECK(std::fabs(sum * width - 1.0) < 1e-9);
}

TEST_CASE("default schedule", "[kde]") {
    const auto s100 = default_schedule(100);
    CHECK(s100.h == Approx(0.1).epsilon(1e-15));
    CHECK(s100.e == Approx(std::pow(100.0, -0.2)).epsilon(1e-15));
    CHECK(s100.e == Approx(0.3981).margin(1e-4));
    const auto s1 = default_schedule(1);
    CHECK(s1.h == 1.0);
    CHECK(s1.e == 1.0);
    CHECK(default_schedule(50).h == Approx(0.14142).margin(1e-5));
    CHECK_THROWS_AS(default_schedule(0), InsufficientDataError);
}

TEST_CASE("rate condition flag", "[kde]") {
    CHECK_FALSE(SmoothingSchedule{}.satisfies_rate_condition());
    CHECK(SmoothingSchedule{0.15, 0.2, 2}.satisfies_rate_condition());
    CHECK_FALSE(SmoothingSchedule{0.05, 0.2, 2}.satisfies_rate_condition());
}

TEST_CASE("kde point values", "[kde]") {
    const auto one = SortedSample::from_values({0.0});
    CHECK(kde_eval(TrimmedDensityEstimate(one, 1.0, 0.001), 0.0) == 0.9375);
    const auto s = SortedSample::from_values({0.0, 1.0, 5.0});
    const TrimmedDensityEstimate f(s, 0.5, 0.01);
    CHECK(kde_eval(f, 2.7) == 0.01);
    CHECK(f.raw(2.7) == 0.0);
    CHECK_THROWS_AS(TrimmedDensityEstimate(s, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(TrimmedDensityEstimate(s, 0.1, 0.0), DomainError);
    CHECK_THROWS_AS(TrimmedDensityEstimate(s, -1.0, 0.1), DomainError);
}

TEST_CASE("kde equals a brute-force double loop bitwise", "[kde]") {
    Rng rng(31);
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t n = 200;
        std::vector<double> v(n);
        const double scale = 0.1 + 5.0 * rng.uniform();
        for (auto& x : v) {
            x = scale * normal_sample(rng);
        }
        const auto s = SortedSample::from_values(v);
        const std::vector<double> sorted(s.ordered().begin(), s.ordered().end());
        const double h = 0.01 + rng.uniform();
        const double e = 1e-3 * rng.uniform() + 1e-9;
        const TrimmedDensityEstimate f(s, h, e);
        for (int q = 0; q < 50; ++q) {
            const double y = scale * 3.0 * (2.0 * rng.uniform() - 1.0);
            REQUIRE(same_bits(kde_eval(f, y), oracle::brute_force_kde(sorted, h, e, y)));
        }
    }
}

TEST_CASE("untrimmed kde integrates to one", "[kde]") {
    Rng rng(32);
    for (int instance = 0; instance < 10; ++instance) {
        std::vector<double> v(150);
        for (auto& x : v) {
            x = normal_sample(rng) * (1.0 + instance);
        }
        const auto s = SortedSample::from_values(v);
        const double h = 0.3 + 0.1 * instance;
        const TrimmedDensityEstimate f(s, h, 1e-300);
        const double lo = s.min() - h;
        const double hi = s.max() + h;
        const int steps = 200000;
        const double w = (hi - lo) / steps;
        double sum = 0.5 * (f.raw(lo) + f.raw(hi));
        for (int i = 1; i < steps; ++i) {
            sum += f.raw(lo + i * w);
        }
        CHECK(std::fabs(sum * w - 1.0) < 1e-6);
    }
}

TEST_CASE("kde floor and ordering", "[kde]") {
    Rng rng(33);
    std::vector<double> v(300);
    for (auto& x : v) {
        x = normal_sample(rng);
    }
    const auto s = SortedSample::from_values(v);
    const TrimmedDensityEstimate f(s, SmoothingSchedule{});
    for (int i = 0; i < 2000; ++i) {
        const double y = 10.0 * (2.0 * rng.uniform() - 1.0);
        CHECK(f(y) >= f.e());
        CHECK(f(y) >= f.raw(y));
    }
}

TEST_CASE("kde is translation equivariant", "[kde]") {
    Rng rng(34);
    std::vector<double> v(250);
    for (auto& x : v) {
        x = normal_sample(rng);
    }
    const double shift = 3.0;
    std::vector<double> w = v;
    for (auto& x : w) {
        x += shift;
    }
    const auto s = SortedSample::from_values(v);
    const auto t = SortedSample::from_values(w);
    const TrimmedDensityEstimate f(s, 0.4, 1e-9);
    const TrimmedDensityEstimate g(t, 0.4, 1e-9);
    for (double y = -3.0; y <= 3.0; y += 0.05) {
        CHECK(std::fabs(f(y) - g(y + shift)) < 1e-12);
    }
}

TEST_CASE("kde is consistent for a normal sample", "[kde]") {
    Rng rng(35);
    std::vector<double> v(10000);
    for (auto& x : v) {
        x = normal_sample(rng);
    }
    const auto s = SortedSample::from_values(v);
    const TrimmedDensityEstimate f(s, SmoothingSchedule{});
    double worst = 0.0;
    for (double y : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        worst = std::max(worst, std::fabs(f.raw(y) - StdNormal::pdf(y)));
    }
    CHECK(worst <= 0.05);
}
