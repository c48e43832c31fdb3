#pragma once

// Order-statistic machinery: samples, empirical CDFs and the step-function
// estimators of an unknown monotone transform g with X = g(Y).

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace xformtest {

/// A nonempty vector of finite observations.
class Sample {
  public:
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

  private:
    std::vector<double> values_;
};

/// Order-statistic view of a sample: values sorted nondecreasingly.
class SortedSample {
  public:
    /// Sorts `values`; throws InsufficientDataError when empty and
    /// DomainError on non-finite entries.
    static SortedSample from_values(std::vector<double> values);

    std::span<const double> ordered() const noexcept { return ordered_; }
    std::size_t size() const noexcept { return ordered_.size(); }
    double operator[](std::size_t i) const noexcept { return ordered_[i]; }

    /// X_(rank), rank counted from 1.
    double order_statistic(std::size_t rank) const;

    double min() const noexcept { return ordered_.front(); }
    double max() const noexcept { return ordered_.back(); }

    /// #{i : X_i <= y}
    std::size_t count_at_most(double y) const noexcept;

  private:
    explicit SortedSample(std::vector<double> ordered) : ordered_(std::move(ordered)) {}

    std::vector<double> ordered_;
};

SortedSample sort_sample(const Sample& s);

/// A known, invertible reference distribution.
struct KnownCdf {
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;

    static KnownCdf standard_normal();

    /// Piecewise-linear distribution through the points (q_i, p_i) of a
    /// quantile table. Probabilities must increase strictly from 0 to 1
    /// and quantiles must increase strictly, so the support is [q_0, q_last].
    static KnownCdf from_quantile_table(std::vector<double> probabilities, std::vector<double> quantiles);
};

class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(SortedSample support) : support_(std::move(support)) {}

    const SortedSample& support() const noexcept { return support_; }
    std::size_t size() const noexcept { return support_.size(); }

    double operator()(double y) const noexcept {
        return static_cast<double>(support_.count_at_most(y)) / static_cast<double>(support_.size());
    }

  private:
    SortedSample support_;
};

double ecdf_eval(const EmpiricalCdf& F, double y);

struct TransformEstimate {
    double at = 0.0;        // query point y
    double value = 0.0;     // selected order statistic
    std::size_t index = 0;  // its rank, 1-based
};

/// Estimator with a known reference CDF: X_(r), r = min(floor(n F_Y(y)) + 1, n).
TransformEstimate g_hat_case1(const SortedSample& x, const KnownCdf& f_y, double y);

/// Same rule for a precomputed reference probability p = F_Y(y).
TransformEstimate g_hat_case1_at_level(const SortedSample& x, double p, double y);

/// Estimator with an estimated reference CDF: X_(r) with
/// r = clamp(floor(n_x F_hat_Y(y)), 1, n_x). The rank is computed in
/// integer arithmetic from the empirical count, so no rounding can move it.
TransformEstimate g_hat_case2(const SortedSample& x, const EmpiricalCdf& f_y_hat, double y);

/// Weighted convex combination of two estimates at the same point.
/// With w1 = n_x + n_y and w2 = n~_x + n~_y this is the pooled estimator
/// of a common transform under the null.
double aggregate_estimator(const TransformEstimate& g1, const TransformEstimate& g2, double w1, double w2);

/// Kolmogorov distance sup_x |F_n(x) - F(x)| between a sample and a
/// continuous CDF.
double ks_distance(const SortedSample& s, const std::function<double(double)>& cdf);

}  // namespace xformtest
