#include "xformtest/testing.hpp"

#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"

#include <string>

namespace xformtest {

namespace {

struct VarianceParts {
    TransformEstimate g;
    TransformEstimate g_tilde;
    double sigma2;
};

void require_interior(double p, double y, const char* which) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DegeneratePointError(y, std::string(which) + " = " + std::to_string(p) + " is not inside (0,1)");
    }
}

double weighted_variance(double weight, double p, double f, double p_tilde, double f_tilde) {
    return (1.0 - weight) * p * (1.0 - p) / (f * f) + weight * p_tilde * (1.0 - p_tilde) / (f_tilde * f_tilde);
}

VarianceParts case1_parts(const Case1Inputs& in) {
    const std::size_t n = in.x.size();
    const std::size_t n_tilde = in.x_tilde.size();
    if (n < 2 || n_tilde < 2) {
        throw InsufficientDataError("T1 needs at least two observations in each sample");
    }
    const double p = in.f_y.cdf(in.y);
    const double p_tilde = in.f_y_tilde.cdf(in.y);
    require_interior(p, in.y, "F_Y(y)");
    require_interior(p_tilde, in.y, "F_Y~(y)");

    VarianceParts parts{g_hat_case1_at_level(in.x, p, in.y), g_hat_case1_at_level(in.x_tilde, p_tilde, in.y), 0.0};
    const TrimmedDensityEstimate f_x(in.x, in.schedule);
    const TrimmedDensityEstimate f_x_tilde(in.x_tilde, in.schedule);
    const double a = static_cast<double>(n) / static_cast<double>(n + n_tilde);
    parts.sigma2 = weighted_variance(a, p, f_x(parts.g.value), p_tilde, f_x_tilde(parts.g_tilde.value));
    return parts;
}

double harmonic(std::size_t a, std::size_t b) {
    return static_cast<double>(a) * static_cast<double>(b) / static_cast<double>(a + b);
}

VarianceParts case2_parts(const Case2Inputs& in) {
    const double p = in.f_y(in.y);
    const double p_tilde = in.f_y_tilde(in.y);
    require_interior(p, in.y, "F_hat_Y(y)");
    require_interior(p_tilde, in.y, "F_hat_Y~(y)");

    VarianceParts parts{g_hat_case2(in.x, in.f_y, in.y), g_hat_case2(in.x_tilde, in.f_y_tilde, in.y), 0.0};
    const TrimmedDensityEstimate f_x(in.x, in.schedule);
    const TrimmedDensityEstimate f_x_tilde(in.x_tilde, in.schedule);
    const double big_n = harmonic(in.x.size(), in.f_y.size());
    const double big_n_tilde = harmonic(in.x_tilde.size(), in.f_y_tilde.size());
    const double b = big_n / (big_n + big_n_tilde);
    parts.sigma2 = weighted_variance(b, p, f_x(parts.g.value), p_tilde, f_x_tilde(parts.g_tilde.value));
    return parts;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("significance level must lie in (0,1), got " + std::to_string(alpha));
    }
}

TestResult assemble(const VarianceParts& parts, double m, double y, double alpha) {
    TestResult r;
    r.y = y;
    r.g_hat = parts.g.value;
    r.g_tilde_hat = parts.g_tilde.value;
    r.sigma2_hat = parts.sigma2;
    r.effective_m = m;
    const double diff = parts.g.value - parts.g_tilde.value;
    r.statistic = m * diff * diff / parts.sigma2;
    decide(r, alpha);
    return r;
}

}  // namespace

void decide(TestResult& r, double alpha) {
    check_alpha(alpha);
    r.alpha = alpha;
    r.p_value = 1.0 - chi2_cdf(r.statistic);
    r.reject = r.statistic > chi2_quantile(1.0 - alpha);
}

double sigma2_case1(const Case1Inputs& in) {
    return case1_parts(in).sigma2;
}

TestResult t1_statistic(const Case1Inputs& in, double alpha) {
    check_alpha(alpha);
    const VarianceParts parts = case1_parts(in);
    TestResult r = assemble(parts, harmonic(in.x.size(), in.x_tilde.size()), in.y, alpha);
    r.test_case = TestCase::Known;
    r.n = in.x.size();
    r.n_tilde = in.x_tilde.size();
    return r;
}

double sigma2_case2(const Case2Inputs& in) {
    return case2_parts(in).sigma2;
}

TestResult t2_statistic(const Case2Inputs& in, double alpha) {
    check_alpha(alpha);
    const VarianceParts parts = case2_parts(in);
    const double big_n = harmonic(in.x.size(), in.f_y.size());
    const double big_n_tilde = harmonic(in.x_tilde.size(), in.f_y_tilde.size());
    const double m = big_n * big_n_tilde / (big_n + big_n_tilde);
    TestResult r = assemble(parts, m, in.y, alpha);
    r.test_case = TestCase::Estimated;
    r.n = in.x.size();
    r.n_tilde = in.x_tilde.size();
    r.n_y = in.f_y.size();
    r.n_y_tilde = in.f_y_tilde.size();
    return r;
}

}  // namespace xformtest
