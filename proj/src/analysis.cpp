#include "xformtest/analysis.hpp"

#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace xformtest {

namespace {

double interpolated_quantile(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mu) * (x - mu);
    }
    return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

DescriptiveStats describe(const Sample& s) {
    if (s.size() < 2) {
        throw InsufficientDataError("describe: need at least two observations");
    }
    const SortedSample sorted = sort_sample(s);
    const auto v = sorted.ordered();
    const auto n = static_cast<double>(v.size());

    DescriptiveStats out;
    out.n = v.size();
    out.min = sorted.min();
    out.max = sorted.max();
    out.q1 = interpolated_quantile(v, 0.25);
    out.median = interpolated_quantile(v, 0.5);
    out.q3 = interpolated_quantile(v, 0.75);
    out.mean = mean_of(v);

    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double x : v) {
        const double d = x - out.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 == 0.0) {
        throw InsufficientDataError("describe: sample has zero variance");
    }
    out.variance = m2 * n / (n - 1.0);
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);

    const double mu = out.mean;
    const double sd = std::sqrt(out.variance);
    out.ks_normal = ks_distance(sorted, [mu, sd](double x) { return normal_cdf((x - mu) / sd); });
    return out;
}

const std::vector<double>& EstimatorGrid::column(GridColumn which) const {
    switch (which) {
        case GridColumn::G:
            return g;
        case GridColumn::GTilde:
            return g_tilde;
        case GridColumn::G0:
            return g0;
    }
    return g;
}

EstimatorGrid build_grid(const Sample& y, const Sample& y_tilde, const SortedSample& x, const SortedSample& x_tilde,
                         std::size_t m) {
    if (m < 2) {
        throw DomainError("build_grid: need at least two grid points");
    }
    const EmpiricalCdf f_y(sort_sample(y));
    const EmpiricalCdf f_y_tilde(sort_sample(y_tilde));

    EstimatorGrid grid;
    grid.c = std::max(f_y.support().min(), f_y_tilde.support().min());
    grid.d = std::min(f_y.support().max(), f_y_tilde.support().max());
    if (!(grid.c < grid.d)) {
        throw NoOverlapError("training samples do not overlap: c=" + std::to_string(grid.c) +
                             " d=" + std::to_string(grid.d));
    }

    const auto w = static_cast<double>(x.size() + y.size());
    const auto w_tilde = static_cast<double>(x_tilde.size() + y_tilde.size());
    grid.points.reserve(m);
    for (std::size_t i = 1; i <= m; ++i) {
        const double yi = grid.c + (grid.d - grid.c) * static_cast<double>(i) / static_cast<double>(m);
        const TransformEstimate g = g_hat_case2(x, f_y, yi);
        const TransformEstimate gt = g_hat_case2(x_tilde, f_y_tilde, yi);
        grid.points.push_back(yi);
        grid.g.push_back(g.value);
        grid.g_tilde.push_back(gt.value);
        grid.g0.push_back(aggregate_estimator(g, gt, w, w_tilde));
    }
    return grid;
}

LinearFit ols_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DomainError("ols: abscissae and ordinates differ in length");
    }
    if (xs.size() < 2) {
        throw InsufficientDataError("ols: need at least two points, got " + std::to_string(xs.size()));
    }
    const double x_bar = mean_of(xs);
    const double y_bar = mean_of(ys);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - x_bar;
        sxx += dx * dx;
        sxy += dx * (ys[i] - y_bar);
    }
    if (sxx == 0.0) {
        throw InsufficientDataError("ols: all abscissae are equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_bar - fit.slope * x_bar;
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    fit.lo = *lo;
    fit.hi = *hi;
    fit.points = xs.size();
    return fit;
}

LinearFit ols_fit(const EstimatorGrid& grid, GridColumn column, double lo, double hi) {
    const auto& values = grid.column(column);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        if (grid.points[i] >= lo && grid.points[i] <= hi) {
            xs.push_back(grid.points[i]);
            ys.push_back(values[i]);
        }
    }
    LinearFit fit = ols_line(xs, ys);
    fit.lo = lo;
    fit.hi = hi;
    return fit;
}

LinearFit parametric_affine(const Sample& x, const Sample& y) {
    if (x.size() != y.size()) {
        throw DomainError("parametric_affine: X and Y must be paired (equal lengths)");
    }
    if (sample_variance(y.values()) == 0.0 || y.size() < 2) {
        throw InsufficientDataError("parametric_affine: Y has zero variance");
    }
    LinearFit fit = ols_line(y.values(), x.values());
    return fit;
}

LinearFit combine_fits(const LinearFit& a, double weight_a, const LinearFit& b, double weight_b) {
    if (!(weight_a >= 0.0 && weight_b >= 0.0) || !(weight_a + weight_b > 0.0)) {
        throw DomainError("combine_fits: weights must be nonnegative with a positive sum");
    }
    const double total = weight_a + weight_b;
    LinearFit out;
    out.slope = (weight_a * a.slope + weight_b * b.slope) / total;
    out.intercept = (weight_a * a.intercept + weight_b * b.intercept) / total;
    out.lo = std::min(a.lo, b.lo);
    out.hi = std::max(a.hi, b.hi);
    out.points = a.points + b.points;
    return out;
}

Moments predict_moments(const LinearFit& fit, double mean_in, double var_in) {
    if (!(var_in >= 0.0)) {
        throw DomainError("predict_moments: variance must be >= 0");
    }
    return {fit.slope * mean_in + fit.intercept, fit.slope * fit.slope * var_in};
}

AnalysisResult analyze(const Sample& x, const Sample& y, const Sample& x_tilde, const Sample& y_tilde,
                       const AnalysisOptions& opts) {
    AnalysisResult r;
    r.y = describe(y);
    r.x = describe(x);
    r.y_tilde = describe(y_tilde);
    r.x_tilde = describe(x_tilde);

    const SortedSample xs = sort_sample(x);
    const SortedSample xts = sort_sample(x_tilde);
    r.grid = build_grid(y, y_tilde, xs, xts, opts.grid_points);
    r.fit_g = ols_fit(r.grid, GridColumn::G, opts.window_lo, opts.window_hi);
    r.fit_g_tilde = ols_fit(r.grid, GridColumn::GTilde, opts.window_lo, opts.window_hi);
    r.fit_g0 = ols_fit(r.grid, GridColumn::G0, opts.window_lo, opts.window_hi);

    const auto w = static_cast<double>(x.size() + y.size());
    const auto w_tilde = static_cast<double>(x_tilde.size() + y_tilde.size());
    if (x.size() == y.size() && x_tilde.size() == y_tilde.size()) {
        r.parametric_g = parametric_affine(x, y);
        r.parametric_g_tilde = parametric_affine(x_tilde, y_tilde);
        r.parametric_g0 = combine_fits(*r.parametric_g, w, *r.parametric_g_tilde, w_tilde);
    }

    auto compare = [&](const DescriptiveStats& in, const DescriptiveStats& observed) {
        MomentComparison mc;
        mc.observed = {observed.mean, observed.variance};
        mc.nonparametric = predict_moments(r.fit_g0, in.mean, in.variance);
        if (r.parametric_g0) {
            mc.parametric = predict_moments(*r.parametric_g0, in.mean, in.variance);
        }
        return mc;
    };
    r.moments_x = compare(r.y, r.x);
    r.moments_x_tilde = compare(r.y_tilde, r.x_tilde);

    const EmpiricalCdf f_y(sort_sample(y));
    const EmpiricalCdf f_y_tilde(sort_sample(y_tilde));
    const double at = opts.test_point.value_or(r.y.median);
    try {
        r.test = t2_statistic(Case2Inputs{xs, xts, f_y, f_y_tilde, opts.schedule, at}, opts.alpha);
    } catch (const DegeneratePointError&) {
        r.test.reset();
    }
    return r;
}

}  // namespace xformtest
