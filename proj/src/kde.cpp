#include "xformtest/kde.hpp"

#include "xformtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xformtest {

double SmoothingSchedule::bandwidth(std::size_t n) const {
    if (n == 0) {
        throw InsufficientDataError("bandwidth: sample size must be positive");
    }
    return std::pow(static_cast<double>(n), -c1);
}

double SmoothingSchedule::trim(std::size_t n) const {
    if (n == 0) {
        throw InsufficientDataError("trim: sample size must be positive");
    }
    return std::pow(static_cast<double>(n), -c2);
}

bool SmoothingSchedule::satisfies_rate_condition() const noexcept {
    return c2 / k < c1 && c1 < 1.0 / (1.0 + 2.0 * k);
}

BandwidthTrim default_schedule(std::size_t n) {
    const SmoothingSchedule s;
    return {s.bandwidth(n), s.trim(n)};
}

TrimmedDensityEstimate::TrimmedDensityEstimate(const SortedSample& sample, double h, double e)
    : sample_(&sample), h_(h), e_(e) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("kernel bandwidth must be positive, got " + std::to_string(h));
    }
    if (!(e > 0.0) || !std::isfinite(e)) {
        throw DomainError("density floor must be positive, got " + std::to_string(e));
    }
}

TrimmedDensityEstimate::TrimmedDensityEstimate(const SortedSample& sample, const SmoothingSchedule& schedule)
    : TrimmedDensityEstimate(sample, schedule.bandwidth(sample.size()), schedule.trim(sample.size())) {}

double TrimmedDensityEstimate::raw(double y) const noexcept {
    const auto v = sample_->ordered();
    // A window of two bandwidths keeps every point whose rounded kernel
    // argument could still land inside (-1, 1).
    const auto first = std::lower_bound(v.begin(), v.end(), y - 2.0 * h_);
    const auto last = std::upper_bound(first, v.end(), y + 2.0 * h_);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
        sum += quartic_kernel((*it - y) / h_);
    }
    return sum / (static_cast<double>(v.size()) * h_);
}

double TrimmedDensityEstimate::operator()(double y) const noexcept {
    return std::max(raw(y), e_);
}

double kde_eval(const TrimmedDensityEstimate& d, double y) {
    return d(y);
}

}  // namespace xformtest
