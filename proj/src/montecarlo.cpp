#include "xformtest/montecarlo.hpp"

#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"
#include "xformtest/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace xformtest {

namespace {

constexpr unsigned kMaxRedraws = 100;

double exp_ratio(double y) {
    return std::exp((y + 3.0) / (y + 5.0));
}

double harmonic(double a, double b) {
    return a * b / (a + b);
}

// Runs body(i) for i in [0, count) on `threads` workers. Work is handed out
// by an atomic counter; results must be written to slot i by the body. The
// exception from the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::vector<double> draw_normals(Rng& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) {
        v = normal_sample(rng);
    }
    return out;
}

SortedSample transformed(const std::vector<double>& draws, const TransformSpec& t, double base) {
    std::vector<double> out(draws.size());
    std::transform(draws.begin(), draws.end(), out.begin(), [&](double y) { return t.evaluate(y, base); });
    return SortedSample::from_values(std::move(out));
}

double central_derivative(const TransformSpec& t, double y, double base) {
    const double step = 1e-5 * std::max(1.0, std::fabs(y));
    return (t.evaluate(y + step, base) - t.evaluate(y - step, base)) / (2.0 * step);
}

}  // namespace

TransformSpec TransformSpec::null_exp() {
    return {TransformKind::NullExp, "null", 0.0, 0.0, 0.0, {}};
}

TransformSpec TransformSpec::shift_exp() {
    return {TransformKind::ShiftExp, "g1", 0.0, 0.0, 0.0, {}};
}

TransformSpec TransformSpec::scale_exp() {
    return {TransformKind::ScaleExp, "g2", 0.0, 0.0, 0.0, {}};
}

TransformSpec TransformSpec::neg_ratio() {
    return {TransformKind::NegRatio, "g3", 0.0, 0.0, 0.0, {}};
}

TransformSpec TransformSpec::affine(double slope, double intercept) {
    return {TransformKind::Affine, "affine", slope, intercept, 0.0, {}};
}

TransformSpec TransformSpec::local_shift(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("local alternative exponent must be positive, got " + std::to_string(beta));
    }
    return {TransformKind::LocalShift, "g5", 0.0, 0.0, beta, {}};
}

TransformSpec TransformSpec::from_function(std::string label, std::function<double(double)> f) {
    if (!f) {
        throw DomainError("custom transform needs a callable");
    }
    return {TransformKind::Custom, std::move(label), 0.0, 0.0, 0.0, std::move(f)};
}

double TransformSpec::evaluate(double y, double local_base) const {
    switch (kind) {
        case TransformKind::NullExp:
            return exp_ratio(y);
        case TransformKind::ShiftExp:
            return exp_ratio(y) + 1.0;
        case TransformKind::ScaleExp:
            return 2.0 * exp_ratio(y);
        case TransformKind::NegRatio:
            return -(y + 11.0) / (y + 5.0);
        case TransformKind::Affine:
            return slope * y + intercept;
        case TransformKind::LocalShift:
            return exp_ratio(y) + 2.0 * (y + 5.0) / std::pow(local_base, beta);
        case TransformKind::Custom:
            return custom(y);
    }
    return 0.0;
}

std::string to_string(Statistic s) {
    return s == Statistic::T1 ? "T1" : "T2";
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.replications < 1) {
        throw DomainError("scenario needs at least one replication");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1)");
    }
    const auto& s = cfg.sizes;
    if (s.n_x < 2 || s.n_x_tilde < 2) {
        throw DomainError("contaminated samples need at least two observations");
    }
    if (cfg.statistic == Statistic::T2 && (s.n_y < 1 || s.n_y_tilde < 1)) {
        throw DomainError("training samples must be nonempty");
    }
    if (cfg.shared_draws &&
        (s.n_x != s.n_x_tilde || (cfg.statistic == Statistic::T2 && s.n_y != s.n_y_tilde))) {
        throw DomainError("shared draws need matching sample sizes");
    }
    if ((cfg.g.kind == TransformKind::Custom && !cfg.g.custom) ||
        (cfg.g_tilde.kind == TransformKind::Custom && !cfg.g_tilde.custom)) {
        throw DomainError("custom transform without a callable");
    }
    if (cfg.fixed_y && !std::isfinite(*cfg.fixed_y)) {
        throw DomainError("fixed evaluation point must be finite");
    }
}

double effective_size(const ScenarioConfig& cfg) {
    const auto& s = cfg.sizes;
    if (cfg.statistic == Statistic::T1) {
        return harmonic(static_cast<double>(s.n_x), static_cast<double>(s.n_x_tilde));
    }
    const double big_n = harmonic(static_cast<double>(s.n_x), static_cast<double>(s.n_y));
    const double big_n_tilde = harmonic(static_cast<double>(s.n_x_tilde), static_cast<double>(s.n_y_tilde));
    return harmonic(big_n, big_n_tilde);
}

double local_base_value(const ScenarioConfig& cfg) {
    return cfg.local_base == LocalBase::SampleSize ? static_cast<double>(cfg.sizes.n_x) : effective_size(cfg);
}

ReplicationOutcome run_replication(const ScenarioConfig& cfg, std::uint64_t rep_index) {
    Rng rng = make_stream(cfg.seed, rep_index);
    const auto& s = cfg.sizes;
    const double base = local_base_value(cfg);
    const KnownCdf reference = KnownCdf::standard_normal();

    // Draw order within the stream: Y, Y~, then (Case 2) the training
    // samples, then the evaluation point(s).
    const std::vector<double> y_draws = draw_normals(rng, s.n_x);
    const std::vector<double> y_tilde_draws = cfg.shared_draws ? y_draws : draw_normals(rng, s.n_x_tilde);
    const SortedSample x = transformed(y_draws, cfg.g, base);
    const SortedSample x_tilde = transformed(y_tilde_draws, cfg.g_tilde, base);

    std::optional<EmpiricalCdf> f_y;
    std::optional<EmpiricalCdf> f_y_tilde;
    if (cfg.statistic == Statistic::T2) {
        std::vector<double> train = draw_normals(rng, s.n_y);
        std::vector<double> train_tilde = cfg.shared_draws ? train : draw_normals(rng, s.n_y_tilde);
        f_y.emplace(SortedSample::from_values(std::move(train)));
        f_y_tilde.emplace(SortedSample::from_values(std::move(train_tilde)));
    }

    ReplicationOutcome out;
    for (unsigned attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        const double y = cfg.fixed_y ? *cfg.fixed_y : normal_sample(rng);
        try {
            TestResult r;
            if (cfg.statistic == Statistic::T1) {
                r = t1_statistic(Case1Inputs{x, x_tilde, reference, reference, cfg.schedule, y}, cfg.alpha);
            } else {
                r = t2_statistic(Case2Inputs{x, x_tilde, *f_y, *f_y_tilde, cfg.schedule, y}, cfg.alpha);
            }
            out.reject = r.reject;
            out.statistic = r.statistic;
            out.y = y;
            return out;
        } catch (const DegeneratePointError&) {
            ++out.retries;
            if (cfg.fixed_y) {
                break;
            }
        }
    }
    throw ExhaustedRetriesError("replication " + std::to_string(rep_index) + ": no non-degenerate evaluation point after " +
                                std::to_string(out.retries) + " draws");
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
    validate(cfg);
    std::vector<ReplicationOutcome> outcomes(cfg.replications);
    parallel_for(cfg.replications, opts.threads, [&](std::size_t i) { outcomes[i] = run_replication(cfg, i); });

    ScenarioResult r;
    r.statistic = cfg.statistic;
    r.alternative = cfg.g_tilde.label;
    r.n = cfg.sizes.n_x;
    if (cfg.g_tilde.is_local()) {
        r.beta = cfg.g_tilde.beta;
    }
    r.replications = cfg.replications;
    r.seed = cfg.seed;
    if (opts.keep_statistics) {
        r.statistics.reserve(outcomes.size());
    }
    for (const auto& o : outcomes) {
        r.rejections += o.reject ? 1 : 0;
        r.retries += o.retries;
        if (opts.keep_statistics) {
            r.statistics.push_back(o.statistic);
        }
    }
    return r;
}

std::uint64_t scenario_seed(std::uint64_t table_seed, const std::string& key) {
    return substream_seed(table_seed, label_hash(key));
}

namespace {

using Clock = std::chrono::steady_clock;

ScenarioResult run_named(const std::string& table, ScenarioConfig cfg, std::uint64_t table_seed,
                         const RunOptions& opts) {
    std::string key = table + "/" + to_string(cfg.statistic) + "/" + cfg.g_tilde.label + "/n=" +
                      std::to_string(cfg.sizes.n_x);
    if (cfg.g_tilde.is_local()) {
        key += "/beta=" + std::to_string(cfg.g_tilde.beta);
    }
    cfg.seed = scenario_seed(table_seed, key);
    cfg.alpha = opts.alpha;
    cfg.schedule = opts.schedule;
    cfg.local_base = opts.local_base;
    ScenarioResult r = run_scenario(cfg, opts);
    r.table = table;
    return r;
}

ScenarioConfig table_config(Statistic stat, TransformSpec g_tilde, std::size_t n, std::size_t reps) {
    ScenarioConfig cfg;
    cfg.statistic = stat;
    cfg.g = TransformSpec::null_exp();
    cfg.g_tilde = std::move(g_tilde);
    cfg.sizes = SampleSizes::equal(n);
    cfg.replications = reps;
    return cfg;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SimulationReport run_table1(std::uint64_t seed, std::size_t replications, const std::vector<std::size_t>& sizes,
                            const RunOptions& opts) {
    const auto start = Clock::now();
    SimulationReport report;
    report.seed = seed;
    for (Statistic stat : {Statistic::T1, Statistic::T2}) {
        for (std::size_t n : sizes) {
            report.scenarios.push_back(
                run_named("table1", table_config(stat, TransformSpec::null_exp(), n, replications), seed, opts));
        }
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

SimulationReport run_table3(std::uint64_t seed, std::size_t replications, const std::vector<std::size_t>& sizes,
                            const RunOptions& opts) {
    const auto start = Clock::now();
    SimulationReport report;
    report.seed = seed;
    TransformSpec g4 = TransformSpec::affine(4.0, 5.0);
    g4.label = "g4";
    const std::vector<TransformSpec> alternatives = {TransformSpec::shift_exp(), TransformSpec::scale_exp(),
                                                     TransformSpec::neg_ratio(), g4};
    for (const auto& alt : alternatives) {
        for (Statistic stat : {Statistic::T1, Statistic::T2}) {
            for (std::size_t n : sizes) {
                report.scenarios.push_back(run_named("table3", table_config(stat, alt, n, replications), seed, opts));
            }
        }
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

SimulationReport run_table4(std::uint64_t seed, std::size_t replications, const std::vector<std::size_t>& sizes,
                            const std::vector<double>& betas, const RunOptions& opts) {
    const auto start = Clock::now();
    SimulationReport report;
    report.seed = seed;
    for (double beta : betas) {
        for (Statistic stat : {Statistic::T1, Statistic::T2}) {
            for (std::size_t n : sizes) {
                report.scenarios.push_back(run_named(
                    "table4", table_config(stat, TransformSpec::local_shift(beta), n, replications), seed, opts));
            }
        }
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

double asymptotic_sigma2(const ScenarioConfig& cfg, double y) {
    const double base = local_base_value(cfg);
    const double p = normal_cdf(y);
    const double density = StdNormal::pdf(y);
    const double slope = central_derivative(cfg.g, y, base);
    const double slope_tilde = central_derivative(cfg.g_tilde, y, base);
    const auto& s = cfg.sizes;
    double weight = 0.0;
    if (cfg.statistic == Statistic::T1) {
        weight = static_cast<double>(s.n_x) / static_cast<double>(s.n_x + s.n_x_tilde);
    } else {
        const double big_n = harmonic(static_cast<double>(s.n_x), static_cast<double>(s.n_y));
        const double big_n_tilde = harmonic(static_cast<double>(s.n_x_tilde), static_cast<double>(s.n_y_tilde));
        weight = big_n / (big_n + big_n_tilde);
    }
    // f_X(g(y)) = phi(y) / g'(y) for X = g(Y), Y ~ N(0,1).
    const double term = p * (1.0 - p) / (density * density);
    return (1.0 - weight) * term * slope * slope + weight * term * slope_tilde * slope_tilde;
}

NoncentralDiagnostic local_alternative_diagnostic(const ScenarioConfig& cfg, const RunOptions& opts) {
    if (!cfg.fixed_y) {
        throw DomainError("noncentral diagnostic needs a fixed evaluation point");
    }
    if (!cfg.g_tilde.is_local() || cfg.g.kind != TransformKind::NullExp) {
        throw DomainError("noncentral diagnostic needs g = null_exp and a local-shift alternative");
    }
    RunOptions keep = opts;
    keep.keep_statistics = true;
    const ScenarioResult sim = run_scenario(cfg, keep);

    NoncentralDiagnostic d;
    d.y = *cfg.fixed_y;
    ScenarioConfig null_cfg = cfg;
    null_cfg.g_tilde = TransformSpec::null_exp();
    d.sigma2 = asymptotic_sigma2(null_cfg, d.y);
    const double shift = 2.0 * (d.y + 5.0) / std::pow(local_base_value(cfg), cfg.g_tilde.beta);
    d.lambda = effective_size(cfg) * shift * shift / d.sigma2;

    const NoncentralChiSquared1 law(d.lambda);
    d.ks_distance = ks_distance(SortedSample::from_values(sim.statistics), [&](double t) { return law.cdf(t); });
    d.simulated_power = sim.reject_pct();
    d.predicted_power = 100.0 * (1.0 - law.cdf(chi2_quantile(1.0 - cfg.alpha)));
    return d;
}

}  // namespace xformtest
