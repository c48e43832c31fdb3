#pragma once

// Data-analysis pipeline for paired before/after measurements:
// descriptive statistics, the Case-2 transform estimators on a common grid,
// affine summaries of those estimators and a parametric benchmark.

#include "xformtest/empirical.hpp"
#include "xformtest/kde.hpp"
#include "xformtest/testing.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace xformtest {

/// Sample summary. Quartiles use linear interpolation between order
/// statistics (Hyndman-Fan type 7). Variance divides by n-1; skewness is
/// m3/m2^(3/2) and kurtosis m4/m2^2 (not excess) with central moments over n.
/// ks_normal is the Kolmogorov distance to a normal with the sample mean and
/// standard deviation plugged in.
struct DescriptiveStats {
    std::size_t n = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    double ks_normal = 0.0;
};

DescriptiveStats describe(const Sample& s);

enum class GridColumn { G, GTilde, G0 };

/// g_hat, g~_hat and their aggregate on y_i = c + (d - c) i / M, i = 1..M,
/// with [c, d] the overlap of the two training ranges.
struct EstimatorGrid {
    double c = 0.0;
    double d = 0.0;
    std::vector<double> points;
    std::vector<double> g;
    std::vector<double> g_tilde;
    std::vector<double> g0;

    const std::vector<double>& column(GridColumn which) const;
};

/// Throws NoOverlapError when the training ranges do not overlap and
/// DomainError when m < 2.
EstimatorGrid build_grid(const Sample& y, const Sample& y_tilde, const SortedSample& x, const SortedSample& x_tilde,
                         std::size_t m);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 0;

    double operator()(double y) const noexcept { return slope * y + intercept; }
};

/// Least squares line through (y_i, column_i) for grid points in [lo, hi].
/// Throws InsufficientDataError with fewer than two distinct abscissae.
LinearFit ols_fit(const EstimatorGrid& grid, GridColumn column, double lo, double hi);

/// Least squares line through arbitrary points; the building block of ols_fit.
LinearFit ols_line(std::span<const double> xs, std::span<const double> ys);

/// Regression of X on Y for paired observations: slope cov(X,Y)/var(Y),
/// intercept mean(X) - slope mean(Y).
LinearFit parametric_affine(const Sample& x, const Sample& y);

/// Weighted average of two affine fits' coefficients.
LinearFit combine_fits(const LinearFit& a, double weight_a, const LinearFit& b, double weight_b);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Moments of slope*Y + intercept given the moments of Y.
Moments predict_moments(const LinearFit& fit, double mean_in, double var_in);

struct MomentComparison {
    Moments observed;
    Moments nonparametric;
    std::optional<Moments> parametric;
};

struct AnalysisOptions {
    std::size_t grid_points = 50;
    double window_lo = 100.0;
    double window_hi = 200.0;
    double alpha = 0.05;
    SmoothingSchedule schedule{};
    std::optional<double> test_point;  // defaults to the median of Y
};

struct AnalysisResult {
    DescriptiveStats y;
    DescriptiveStats x;
    DescriptiveStats y_tilde;
    DescriptiveStats x_tilde;
    EstimatorGrid grid;
    LinearFit fit_g;
    LinearFit fit_g_tilde;
    LinearFit fit_g0;
    // Present only when X/Y and X~/Y~ are paired (equal lengths).
    std::optional<LinearFit> parametric_g;
    std::optional<LinearFit> parametric_g_tilde;
    std::optional<LinearFit> parametric_g0;
    MomentComparison moments_x;
    MomentComparison moments_x_tilde;
    // T2 at the test point; absent when that point is degenerate.
    std::optional<TestResult> test;
};

AnalysisResult analyze(const Sample& x, const Sample& y, const Sample& x_tilde, const Sample& y_tilde,
                       const AnalysisOptions& opts = {});

}  // namespace xformtest
