#pragma once

// Pointwise chi-squared tests of H0: g = g~ for X = g(Y), X~ = g~(Y~).
//
// T1 uses known reference CDFs F_Y, F_Y~. T2 replaces them by empirical
// CDFs of training samples observed before the transformation. Both
// statistics have the form
//
//   T(y) = m * (g_hat(y) - g~_hat(y))^2 / sigma2_hat(y)
//
// with m the harmonic combination of the sample sizes, and converge to a
// chi-squared law with one degree of freedom under H0.

#include "xformtest/empirical.hpp"
#include "xformtest/kde.hpp"

#include <cstddef>

namespace xformtest {

/// Known-reference inputs. Holds references; everything must outlive the
/// call that consumes it.
struct Case1Inputs {
    const SortedSample& x;
    const SortedSample& x_tilde;
    const KnownCdf& f_y;
    const KnownCdf& f_y_tilde;
    SmoothingSchedule schedule{};
    double y = 0.0;
};

/// Training-sample inputs: the reference CDFs are empirical.
struct Case2Inputs {
    const SortedSample& x;
    const SortedSample& x_tilde;
    const EmpiricalCdf& f_y;
    const EmpiricalCdf& f_y_tilde;
    SmoothingSchedule schedule{};
    double y = 0.0;
};

enum class TestCase { Known = 1, Estimated = 2 };

struct TestResult {
    TestCase test_case = TestCase::Known;
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.05;
    double y = 0.0;
    double g_hat = 0.0;
    double g_tilde_hat = 0.0;
    double sigma2_hat = 0.0;
    double effective_m = 0.0;  // n n~/(n + n~) or N N~/(N + N~)
    // Case 1: n, n~. Case 2: n_x, n~_x, with n_y, n~_y alongside.
    std::size_t n = 0;
    std::size_t n_tilde = 0;
    std::size_t n_y = 0;
    std::size_t n_y_tilde = 0;
};

/// Plug-in asymptotic variance with known reference CDFs:
///   (1-a) F_Y(1-F_Y) / f_X^2(g_hat) + a F_Y~(1-F_Y~) / f_X~^2(g~_hat),
/// a = n/(n+n~), densities from the trimmed quartic KDE.
/// Throws DegeneratePointError when either reference CDF is 0 or 1 at y.
double sigma2_case1(const Case1Inputs& in);

TestResult t1_statistic(const Case1Inputs& in, double alpha = 0.05);

/// Same structure with empirical CDFs and weight b = N/(N+N~),
/// N = n_x n_y/(n_x+n_y).
double sigma2_case2(const Case2Inputs& in);

TestResult t2_statistic(const Case2Inputs& in, double alpha = 0.05);

/// Fills p_value and reject from the statistic: p = 1 - F_chi2(T) and
/// reject iff T > chi2_quantile(1 - alpha).
void decide(TestResult& r, double alpha);

}  // namespace xformtest
