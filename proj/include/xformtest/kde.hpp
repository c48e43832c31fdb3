#pragma once

#include "xformtest/empirical.hpp"

#include <cstddef>

namespace xformtest {

enum class KernelKind { Quartic };

/// Compactly supported kernel on (-1, 1).
struct KernelSpec {
    KernelKind kind = KernelKind::Quartic;
    static constexpr double support_radius = 1.0;
};

/// K(u) = 15/16 (1 - u^2)^2 on |u| < 1, zero elsewhere.
constexpr double quartic_kernel(double u) noexcept {
    if (!(u > -1.0 && u < 1.0)) {
        return 0.0;
    }
    const double w = 1.0 - u * u;
    return 0.9375 * w * w;
}

/// Bandwidth h_n = n^-c1 and density floor e_n = n^-c2.
///
/// The consistency argument for the chi-squared limit needs
/// c2/k < c1 < 1/(1+2k), where k is the smoothness order of the density.
/// That condition is reported by `satisfies_rate_condition()` but never
/// enforced: the default exponents (1/2, 1/5) used for the simulation
/// tables do not meet it for k = 2.
struct SmoothingSchedule {
    double c1 = 0.5;
    double c2 = 0.2;
    int k = 2;

    double bandwidth(std::size_t n) const;
    double trim(std::size_t n) const;
    bool satisfies_rate_condition() const noexcept;
};

struct BandwidthTrim {
    double h;
    double e;
};

BandwidthTrim default_schedule(std::size_t n);

/// Kernel density estimate floored at `e`:
///   f(y) = max( (1/(n h)) sum_i K((X_i - y)/h), e ).
/// Terms are accumulated in ascending sample order; only points within
/// the kernel support are visited, which is bitwise identical to the full sum
/// because the skipped terms are exact zeros. Holds a reference to the
/// sample, which must outlive the estimate.
class TrimmedDensityEstimate {
  public:
    TrimmedDensityEstimate(const SortedSample& sample, double h, double e);
    TrimmedDensityEstimate(const SortedSample& sample, const SmoothingSchedule& schedule);

    double h() const noexcept { return h_; }
    double e() const noexcept { return e_; }
    const SortedSample& sample() const noexcept { return *sample_; }

    /// Untrimmed kernel estimate.
    double raw(double y) const noexcept;
    double operator()(double y) const noexcept;

  private:
    const SortedSample* sample_;
    double h_;
    double e_;
};

double kde_eval(const TrimmedDensityEstimate& d, double y);

}  // namespace xformtest
