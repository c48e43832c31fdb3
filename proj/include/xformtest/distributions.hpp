#pragma once

#include "xformtest/random.hpp"

namespace xformtest {

/// Regularized lower incomplete gamma P(s, x) = γ(s, x) / Γ(s).
/// Series expansion for x < s + 1, Lentz continued fraction otherwise.
/// Throws DomainError for s <= 0 or x < 0.
double reg_inc_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), computed
/// directly so small tails keep their relative accuracy.
double reg_inc_gamma_upper(double s, double x);

double chi2_cdf(double x);
double chi2_quantile(double p);

/// CDF of the noncentral chi-squared distribution with one degree of
/// freedom and noncentrality `lambda`, as a Poisson(lambda/2) mixture of
/// central chi-squared CDFs with 1 + 2j degrees of freedom. The series is
/// cut once the remaining Poisson mass is below 1e-12.
double noncentral_chi2_cdf(double lambda, double x);

double normal_cdf(double x);

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley refinement step against erfc.
double normal_quantile(double p);

/// One standard normal draw (Marsaglia polar method, second variate
/// discarded so each call consumes a self-contained block of the stream).
double normal_sample(Rng& rng);

struct StdNormal {
    static double cdf(double x) { return normal_cdf(x); }
    static double quantile(double p) { return normal_quantile(p); }
    static double sample(Rng& rng) { return normal_sample(rng); }
    static double pdf(double x);
};

struct ChiSquared1 {
    static double cdf(double x) { return chi2_cdf(x); }
    static double quantile(double p) { return chi2_quantile(p); }
};

class NoncentralChiSquared1 {
  public:
    explicit NoncentralChiSquared1(double lambda);

    double lambda() const noexcept { return lambda_; }
    double cdf(double x) const { return noncentral_chi2_cdf(lambda_, x); }

  private:
    double lambda_;
};

}  // namespace xformtest
