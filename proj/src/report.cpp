#include "xformtest/report.hpp"

#include "xformtest/io.hpp"
#include "xformtest/kde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace xformtest {

using nlohmann::json;

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json moments_json(const Moments& m) {
    return {{"mean", m.mean}, {"variance", m.variance}};
}

json comparison_json(const MomentComparison& c) {
    json j = {{"observed", moments_json(c.observed)}, {"nonparametric", moments_json(c.nonparametric)}};
    j["parametric"] = c.parametric ? moments_json(*c.parametric) : json(nullptr);
    return j;
}

json optional_fit(const std::optional<LinearFit>& f) {
    return f ? to_json(*f) : json(nullptr);
}

}  // namespace

json to_json(const TestResult& r) {
    json j = {
        {"case", static_cast<int>(r.test_case)},
        {"y", r.y},
        {"g_hat", r.g_hat},
        {"g_tilde_hat", r.g_tilde_hat},
        {"sigma2_hat", r.sigma2_hat},
        {"statistic", r.statistic},
        {"p_value", r.p_value},
        {"reject", r.reject},
        {"alpha", r.alpha},
        {"effective_m", r.effective_m},
        {"n", r.n},
        {"n_tilde", r.n_tilde},
    };
    if (r.test_case == TestCase::Estimated) {
        j["n_y"] = r.n_y;
        j["n_y_tilde"] = r.n_y_tilde;
    }
    return j;
}

std::string simulation_csv(const SimulationReport& report) {
    std::ostringstream out;
    out << "case,statistic,alternative,n,beta,replications,reject_pct,retries,seed\n";
    for (const auto& s : report.scenarios) {
        out << (s.statistic == Statistic::T1 ? 1 : 2) << ',' << to_string(s.statistic) << ',' << s.alternative << ','
            << s.n << ',' << (s.beta ? format_number(*s.beta) : std::string()) << ',' << s.replications << ','
            << format_number(s.reject_pct()) << ',' << s.retries << ',' << s.seed << '\n';
    }
    return out.str();
}

json to_json(const SimulationReport& report) {
    json scenarios = json::array();
    for (const auto& s : report.scenarios) {
        scenarios.push_back({
            {"table", s.table},
            {"case", s.statistic == Statistic::T1 ? 1 : 2},
            {"statistic", to_string(s.statistic)},
            {"alternative", s.alternative},
            {"n", s.n},
            {"beta", s.beta ? json(*s.beta) : json(nullptr)},
            {"replications", s.replications},
            {"rejections", s.rejections},
            {"reject_pct", s.reject_pct()},
            {"retries", s.retries},
            {"seed", s.seed},
        });
    }
    return {{"seed", report.seed}, {"scenarios", scenarios}};
}

json to_json(const DescriptiveStats& s) {
    return {{"n", s.n},           {"min", s.min},           {"q1", s.q1},
            {"median", s.median}, {"mean", s.mean},         {"q3", s.q3},
            {"max", s.max},       {"variance", s.variance}, {"skewness", s.skewness},
            {"kurtosis", s.kurtosis}, {"ks_normal", s.ks_normal}};
}

json to_json(const LinearFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"lo", f.lo}, {"hi", f.hi}, {"points", f.points}};
}

std::string grid_csv(const EstimatorGrid& grid) {
    std::ostringstream out;
    out << "y,g_hat,g_tilde_hat,g0_hat\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        out << format_number(grid.points[i]) << ',' << format_number(grid.g[i]) << ','
            << format_number(grid.g_tilde[i]) << ',' << format_number(grid.g0[i]) << '\n';
    }
    return out.str();
}

std::string grid_svg(const EstimatorGrid& grid) {
    constexpr double width = 640.0;
    constexpr double height = 420.0;
    constexpr double left = 60.0;
    constexpr double right = 140.0;
    constexpr double top = 20.0;
    constexpr double bottom = 40.0;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* col : {&grid.g, &grid.g_tilde, &grid.g0}) {
        for (double v : *col) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double x0 = grid.points.empty() ? 0.0 : grid.points.front();
    double x1 = grid.points.empty() ? 1.0 : grid.points.back();
    if (!(x1 > x0)) {
        x1 = x0 + 1.0;
    }
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - lo) / (hi - lo) * (height - top - bottom); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left << "\" y=\"" << height - 10 << "\">" << sig6(x0) << "</text>\n";
    out << "<text x=\"" << width - right << "\" y=\"" << height - 10 << "\" text-anchor=\"end\">" << sig6(x1)
        << "</text>\n";
    out << "<text x=\"" << left - 4 << "\" y=\"" << height - bottom << "\" text-anchor=\"end\">" << sig6(lo)
        << "</text>\n";
    out << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << sig6(hi)
        << "</text>\n";

    struct Series {
        const std::vector<double>* values;
        const char* name;
        const char* color;
    };
    const Series series[] = {{&grid.g, "g_hat", "#1f77b4"}, {&grid.g_tilde, "g_tilde_hat", "#d62728"},
                             {&grid.g0, "g0_hat", "#2ca02c"}};
    double legend_y = top + 10;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            out << (i ? " " : "") << fixed(px(grid.points[i]), 2) << ',' << fixed(py((*s.values)[i]), 2);
        }
        out << "\"/>\n";
        out << "<line x1=\"" << width - right + 10 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << width - right + 30
            << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right + 35 << "\" y=\"" << legend_y << "\">" << s.name << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
    return out.str();
}

json to_json(const AnalysisResult& r, const AnalysisOptions& opts) {
    json j;
    j["options"] = {{"grid_points", opts.grid_points},
                    {"window", {opts.window_lo, opts.window_hi}},
                    {"alpha", opts.alpha},
                    {"c1", opts.schedule.c1},
                    {"c2", opts.schedule.c2},
                    {"k", opts.schedule.k}};
    j["descriptive"] = {{"y", to_json(r.y)}, {"x", to_json(r.x)}, {"y_tilde", to_json(r.y_tilde)},
                        {"x_tilde", to_json(r.x_tilde)}};
    j["grid"] = {{"c", r.grid.c}, {"d", r.grid.d}, {"points", r.grid.points.size()}};
    j["fits"] = {{"g", to_json(r.fit_g)}, {"g_tilde", to_json(r.fit_g_tilde)}, {"g0", to_json(r.fit_g0)}};
    j["parametric"] = {{"g", optional_fit(r.parametric_g)},
                       {"g_tilde", optional_fit(r.parametric_g_tilde)},
                       {"g0", optional_fit(r.parametric_g0)}};
    j["moments"] = {{"x", comparison_json(r.moments_x)}, {"x_tilde", comparison_json(r.moments_x_tilde)}};
    j["test"] = r.test ? to_json(*r.test) : json(nullptr);
    return j;
}

std::string moment_table(const AnalysisResult& r) {
    std::ostringstream out;
    out << "sample   quantity  observed      nonparametric parametric\n";
    auto row = [&](const char* name, const char* what, double obs, double np, const std::optional<double>& par) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-8s %-9s %-13s %-13s %s\n", name, what, sig6(obs).c_str(), sig6(np).c_str(),
                      par ? sig6(*par).c_str() : "-");
        out << buf;
    };
    for (const auto& [name, c] : {std::pair<const char*, const MomentComparison&>{"X", r.moments_x},
                                  std::pair<const char*, const MomentComparison&>{"X~", r.moments_x_tilde}}) {
        row(name, "mean", c.observed.mean, c.nonparametric.mean,
            c.parametric ? std::optional<double>(c.parametric->mean) : std::nullopt);
        row(name, "variance", c.observed.variance, c.nonparametric.variance,
            c.parametric ? std::optional<double>(c.parametric->variance) : std::nullopt);
    }
    return out.str();
}

std::string density_csv(const std::vector<NamedSample>& samples, std::size_t points) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<SortedSample> sorted;
    sorted.reserve(samples.size());
    for (const auto& s : samples) {
        sorted.push_back(sort_sample(*s.sample));
        lo = std::min(lo, sorted.back().min());
        hi = std::max(hi, sorted.back().max());
    }
    std::ostringstream out;
    out << "sample,x,density\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto v = sorted[k].ordered();
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) {
            mean += x;
        }
        mean /= n;
        double ss = 0.0;
        for (double x : v) {
            ss += (x - mean) * (x - mean);
        }
        const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        const double h = (sd > 0.0 ? sd : 1.0) * std::pow(n, -0.2);
        const TrimmedDensityEstimate f(sorted[k], h, std::numeric_limits<double>::min());
        for (std::size_t i = 0; i < points; ++i) {
            const double x = points > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1) : lo;
            out << samples[k].name << ',' << format_number(x) << ',' << format_number(f.raw(x)) << '\n';
        }
    }
    return out.str();
}

}  // namespace xformtest
