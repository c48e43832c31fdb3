#include "xformtest/empirical.hpp"

#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xformtest {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    if (values.empty()) {
        throw InsufficientDataError(std::string(what) + ": sample is empty");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError(std::string(what) + ": sample contains a non-finite value");
        }
    }
}

}  // namespace

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_, "Sample");
}

SortedSample SortedSample::from_values(std::vector<double> values) {
    require_finite(values, "SortedSample");
    std::stable_sort(values.begin(), values.end());
    return SortedSample(std::move(values));
}

double SortedSample::order_statistic(std::size_t rank) const {
    if (rank < 1 || rank > ordered_.size()) {
        throw DomainError("order statistic rank " + std::to_string(rank) + " outside [1, " +
                          std::to_string(ordered_.size()) + "]");
    }
    return ordered_[rank - 1];
}

std::size_t SortedSample::count_at_most(double y) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(ordered_.begin(), ordered_.end(), y) - ordered_.begin());
}

SortedSample sort_sample(const Sample& s) {
    return SortedSample::from_values(std::vector<double>(s.values().begin(), s.values().end()));
}

KnownCdf KnownCdf::standard_normal() {
    return KnownCdf{[](double y) { return normal_cdf(y); }, [](double p) { return normal_quantile(p); }};
}

KnownCdf KnownCdf::from_quantile_table(std::vector<double> probabilities, std::vector<double> quantiles) {
    if (probabilities.size() != quantiles.size()) {
        throw ParseError("quantile table: probability and quantile columns differ in length");
    }
    if (probabilities.size() < 2) {
        throw ParseError("quantile table: need at least two rows");
    }
    if (probabilities.front() != 0.0 || probabilities.back() != 1.0) {
        throw ParseError("quantile table: probabilities must run from 0 to 1");
    }
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(quantiles[i])) {
            throw ParseError("quantile table: row " + std::to_string(i) + " is out of range");
        }
        if (i > 0 && !(p > probabilities[i - 1] && quantiles[i] > quantiles[i - 1])) {
            throw ParseError("quantile table: columns must be strictly increasing (row " + std::to_string(i) + ")");
        }
    }

    auto interpolate = [](std::span<const double> from, std::span<const double> to, double v) {
        const auto it = std::upper_bound(from.begin(), from.end(), v);
        const auto hi = static_cast<std::size_t>(it - from.begin());
        const std::size_t lo = hi - 1;
        const double t = (v - from[lo]) / (from[hi] - from[lo]);
        return to[lo] + t * (to[hi] - to[lo]);
    };

    KnownCdf out;
    out.cdf = [ps = probabilities, qs = quantiles, interpolate](double y) {
        if (y <= qs.front()) {
            return 0.0;
        }
        if (y >= qs.back()) {
            return 1.0;
        }
        return interpolate(qs, ps, y);
    };
    out.quantile = [ps = probabilities, qs = quantiles, interpolate](double p) {
        if (p <= ps.front()) {
            return qs.front();
        }
        if (p >= ps.back()) {
            return qs.back();
        }
        return interpolate(ps, qs, p);
    };
    return out;
}

double ecdf_eval(const EmpiricalCdf& F, double y) {
    return F(y);
}

TransformEstimate g_hat_case1_at_level(const SortedSample& x, double p, double y) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("reference CDF value must lie in [0,1], got " + std::to_string(p));
    }
    const std::size_t n = x.size();
    const auto raw = static_cast<std::size_t>(std::floor(static_cast<double>(n) * p)) + 1;
    const std::size_t rank = std::min(raw, n);
    return {y, x[rank - 1], rank};
}

TransformEstimate g_hat_case1(const SortedSample& x, const KnownCdf& f_y, double y) {
    return g_hat_case1_at_level(x, f_y.cdf(y), y);
}

TransformEstimate g_hat_case2(const SortedSample& x, const EmpiricalCdf& f_y_hat, double y) {
    const std::size_t n_x = x.size();
    const std::size_t n_y = f_y_hat.size();
    const std::size_t count = f_y_hat.support().count_at_most(y);
    // floor(n_x * count / n_y) without going through floating point.
    const std::size_t raw = (n_x * count) / n_y;
    const std::size_t rank = std::clamp<std::size_t>(raw, 1, n_x);
    return {y, x[rank - 1], rank};
}

double aggregate_estimator(const TransformEstimate& g1, const TransformEstimate& g2, double w1, double w2) {
    if (!(w1 >= 0.0 && w2 >= 0.0) || !(w1 + w2 > 0.0)) {
        throw DomainError("aggregate_estimator: weights must be nonnegative with a positive sum");
    }
    if (g1.at != g2.at) {
        throw DomainError("aggregate_estimator: estimates refer to different query points");
    }
    const double v = (w1 * g1.value + w2 * g2.value) / (w1 + w2);
    // Keep the result inside the hull of the inputs despite rounding.
    return std::clamp(v, std::min(g1.value, g2.value), std::max(g1.value, g2.value));
}

double ks_distance(const SortedSample& s, const std::function<double(double)>& cdf) {
    const auto n = static_cast<double>(s.size());
    double d = 0.0;
    const auto v = s.ordered();
    for (std::size_t i = 0; i < v.size(); ++i) {
        // Only evaluate at the last of a run of ties.
        if (i + 1 < v.size() && v[i + 1] == v[i]) {
            continue;
        }
        const std::size_t first = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), v[i]) - v.begin());
        const double f = cdf(v[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(first) / n;
        d = std::max({d, above, below});
    }
    return d;
}

}  // namespace xformtest
