#include "xformtest/cli.hpp"

#include "xformtest/analysis.hpp"
#include "xformtest/distributions.hpp"
#include "xformtest/errors.hpp"
#include "xformtest/io.hpp"
#include "xformtest/montecarlo.hpp"
#include "xformtest/random.hpp"
#include "xformtest/report.hpp"
#include "xformtest/testing.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace xformtest {

const char* version() noexcept {
    return XFORMTEST_VERSION;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Manifest {
  public:
    explicit Manifest(std::string command) {
        doc_["command"] = std::move(command);
        doc_["version"] = version();
        doc_["started"] = utc_now();
        doc_["inputs"] = json::array();
        doc_["flags"] = json::object();
    }

    json& flags() { return doc_["flags"]; }
    void set(const std::string& key, json value) { doc_[key] = std::move(value); }

    void add_input(const std::string& role, const std::string& path) {
        doc_["inputs"].push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
    }

    // Writes to `path`, or to `fallback` when no path was given.
    void emit(const std::string& path, std::ostream& fallback) {
        doc_["finished"] = utc_now();
        if (path.empty()) {
            fallback << doc_.dump(2) << '\n';
            return;
        }
        write_file(path, doc_.dump(2) + "\n");
    }

    static void write_file(const fs::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f || !(f << text)) {
            throw std::runtime_error("cannot write " + path.string());
        }
    }

  private:
    json doc_;
};

struct ScheduleFlags {
    double c1 = SmoothingSchedule{}.c1;
    double c2 = SmoothingSchedule{}.c2;
    int k = SmoothingSchedule{}.k;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--c1", c1, "bandwidth exponent: h = n^-c1")->capture_default_str();
        cmd->add_option("--c2", c2, "density floor exponent: e = n^-c2")->capture_default_str();
        cmd->add_option("--k", k, "smoothness order in the rate condition")->capture_default_str();
    }
    SmoothingSchedule schedule() const { return {c1, c2, k}; }
    json to_json() const { return {{"c1", c1}, {"c2", c2}, {"k", k}}; }
};

struct PointFlags {
    std::string at = "random";
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string manifest;
    std::string column;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--at", at, "evaluation point y, or 'random' for y ~ N(0,1)")->capture_default_str();
        cmd->add_option("--alpha", alpha, "significance level")->capture_default_str()->check(
            CLI::Range(0.0, 1.0));
        cmd->add_option("--seed", seed, "seed for --at random")->capture_default_str();
        cmd->add_option("--manifest", manifest, "write the run manifest here (default: stderr)");
        cmd->add_option("--column", column, "CSV column name or 0-based index (default: first)");
    }

    double resolve_y() const {
        if (at == "random") {
            Rng rng = make_stream(seed, 0);
            return normal_sample(rng);
        }
        double y = 0.0;
        if (!parse_double(at, y)) {
            throw ParseError("--at: expected a number or 'random', got '" + at + "'");
        }
        return y;
    }

    void record(Manifest& m, double y) const {
        m.flags()["at"] = at;
        m.flags()["alpha"] = alpha;
        m.flags()["column"] = column;
        m.set("seed", seed);
        m.set("evaluation_point", y);
    }
};

Sample load(const std::string& path, const std::string& column, const std::string& role, Manifest& m) {
    m.add_input(role, path);
    return Sample(read_column(path, column));
}

KnownCdf load_reference(const std::string& spec, const std::string& role, Manifest& m) {
    if (spec == "normal") {
        return KnownCdf::standard_normal();
    }
    m.add_input(role, spec);
    return read_quantile_table(spec);
}

unsigned threads_from_env() {
    const char* env = std::getenv("XFORMTEST_THREADS");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    double v = 0.0;
    if (!parse_double(env, v) || v < 1.0 || v != std::floor(v) || v > 1024.0) {
        throw ParseError(std::string("XFORMTEST_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<unsigned>(v);
}

TransformSpec transform_by_name(const std::string& name, double beta, double slope, double intercept) {
    if (name == "null") return TransformSpec::null_exp();
    if (name == "g1") return TransformSpec::shift_exp();
    if (name == "g2") return TransformSpec::scale_exp();
    if (name == "g3") return TransformSpec::neg_ratio();
    if (name == "g4") {
        TransformSpec t = TransformSpec::affine(4.0, 5.0);
        t.label = "g4";
        return t;
    }
    if (name == "affine") return TransformSpec::affine(slope, intercept);
    if (name == "g5") return TransformSpec::local_shift(beta);
    throw ParseError("unknown transform '" + name + "' (expected null, g1, g2, g3, g4, affine or g5)");
}

std::string fs_string(const fs::path& p) {
    return p.string();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pointwise tests for equality of two monotone signal transformations", "xformtest"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    // test1
    auto* t1 = app.add_subcommand("test1", "T1: known reference distributions");
    std::string t1_x, t1_xt, t1_ref = "normal", t1_ref_tilde;
    PointFlags t1_point;
    ScheduleFlags t1_sched;
    t1->add_option("--x", t1_x, "observed sample X")->required();
    t1->add_option("--x-tilde", t1_xt, "observed sample X~")->required();
    t1->add_option("--ref", t1_ref, "reference of Y: 'normal' or a p,q quantile table")->capture_default_str();
    t1->add_option("--ref-tilde", t1_ref_tilde, "reference of Y~ (default: same as --ref)");
    t1_point.add_to(t1);
    t1_sched.add_to(t1);

    // test2
    auto* t2 = app.add_subcommand("test2", "T2: reference distributions from training samples");
    std::string t2_x, t2_y, t2_xt, t2_yt;
    PointFlags t2_point;
    ScheduleFlags t2_sched;
    t2->add_option("--x", t2_x, "observed sample X")->required();
    t2->add_option("--y", t2_y, "training sample Y")->required();
    t2->add_option("--x-tilde", t2_xt, "observed sample X~")->required();
    t2->add_option("--y-tilde", t2_yt, "training sample Y~")->required();
    t2_point.add_to(t2);
    t2_sched.add_to(t2);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo level and power tables");
    std::string sim_table;
    std::size_t sim_reps = 2000;
    std::vector<std::size_t> sim_sizes = {50, 100, 500};
    std::uint64_t sim_seed = 42;
    std::string sim_out;
    std::vector<double> sim_betas = {0.25, 0.5, 4.0};
    std::optional<unsigned> sim_threads;
    std::string sim_local_base = "n";
    double sim_alpha = 0.05;
    ScheduleFlags sim_sched;
    std::string sim_statistic = "T1", sim_g = "null", sim_gt = "null";
    double sim_beta = 0.5, sim_slope = 4.0, sim_intercept = 5.0;
    std::optional<double> sim_fixed_y;
    sim->add_option("--table", sim_table, "1, 3, 4 or custom")
        ->required()
        ->check(CLI::IsMember({"1", "3", "4", "custom"}));
    sim->add_option("--reps", sim_reps, "replications per scenario")->capture_default_str()->check(
        CLI::PositiveNumber);
    sim->add_option("--sizes", sim_sizes, "sample sizes")->delimiter(',')->capture_default_str();
    sim->add_option("--seed", sim_seed, "table seed")->capture_default_str();
    sim->add_option("--out", sim_out, "CSV path; JSON and manifest are written beside it (default: CSV to stdout)");
    sim->add_option("--betas", sim_betas, "local-alternative exponents for table 4")
        ->delimiter(',')
        ->capture_default_str();
    sim->add_option("--threads", sim_threads, "worker threads (fallback: XFORMTEST_THREADS, then 1)")
        ->check(CLI::Range(1u, 1024u));
    sim->add_option("--local-base", sim_local_base, "shrink local alternatives with n or m")
        ->capture_default_str()
        ->check(CLI::IsMember({"n", "m"}));
    sim->add_option("--alpha", sim_alpha, "significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sim_sched.add_to(sim);
    sim->add_option("--statistic", sim_statistic, "custom: T1 or T2")
        ->capture_default_str()
        ->check(CLI::IsMember({"T1", "T2"}));
    sim->add_option("--g", sim_g, "custom: transform of Y (null, g1, g2, g3, g4, affine, g5)")->capture_default_str();
    sim->add_option("--g-tilde", sim_gt, "custom: transform of Y~")->capture_default_str();
    sim->add_option("--beta", sim_beta, "custom: exponent of g5")->capture_default_str();
    sim->add_option("--slope", sim_slope, "custom: slope of affine")->capture_default_str();
    sim->add_option("--intercept", sim_intercept, "custom: intercept of affine")->capture_default_str();
    sim->add_option("--fixed-y", sim_fixed_y, "custom: evaluate at this y instead of drawing it");

    // analyze
    auto* an = app.add_subcommand("analyze", "Estimator grid, affine fits and moment predictions");
    std::string an_x, an_y, an_xt, an_yt, an_prefix, an_column;
    std::string an_col_x, an_col_y, an_col_xt, an_col_yt;
    std::size_t an_points = 50;
    std::vector<double> an_window = {100.0, 200.0};
    std::optional<double> an_test_y;
    double an_alpha = 0.05;
    ScheduleFlags an_sched;
    an->add_option("--x", an_x, "observed sample X")->required();
    an->add_option("--y", an_y, "training sample Y")->required();
    an->add_option("--x-tilde", an_xt, "observed sample X~")->required();
    an->add_option("--y-tilde", an_yt, "training sample Y~")->required();
    an->add_option("--column", an_column, "CSV column for every input (name or 0-based index)");
    an->add_option("--x-column", an_col_x, "column override for --x");
    an->add_option("--y-column", an_col_y, "column override for --y");
    an->add_option("--x-tilde-column", an_col_xt, "column override for --x-tilde");
    an->add_option("--y-tilde-column", an_col_yt, "column override for --y-tilde");
    an->add_option("--grid-points", an_points, "grid size M")->capture_default_str()->check(CLI::Range(2, 1000000));
    an->add_option("--window", an_window, "OLS window lo,hi")->delimiter(',')->expected(2)->capture_default_str();
    an->add_option("--test-y", an_test_y, "point for the T2 test (default: median of Y)");
    an->add_option("--alpha", an_alpha, "significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    an->add_option("--out-prefix", an_prefix, "output path prefix")->required();
    an_sched.add_to(an);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (t1->parsed()) {
            Manifest m("test1");
            const Sample x = load(t1_x, t1_point.column, "x", m);
            const Sample xt = load(t1_xt, t1_point.column, "x_tilde", m);
            if (t1_ref_tilde.empty()) {
                t1_ref_tilde = t1_ref;
            }
            const KnownCdf ref = load_reference(t1_ref, "ref", m);
            const KnownCdf ref_tilde = load_reference(t1_ref_tilde, "ref_tilde", m);
            const double y = t1_point.resolve_y();
            t1_point.record(m, y);
            m.flags()["ref"] = t1_ref;
            m.flags()["ref_tilde"] = t1_ref_tilde;
            m.flags()["schedule"] = t1_sched.to_json();
            const SortedSample xs = sort_sample(x);
            const SortedSample xts = sort_sample(xt);
            const TestResult r =
                t1_statistic(Case1Inputs{xs, xts, ref, ref_tilde, t1_sched.schedule(), y}, t1_point.alpha);
            out << to_json(r).dump(2) << '\n';
            m.emit(t1_point.manifest, err);
            return kExitOk;
        }
        if (t2->parsed()) {
            Manifest m("test2");
            const Sample x = load(t2_x, t2_point.column, "x", m);
            const Sample y_train = load(t2_y, t2_point.column, "y", m);
            const Sample xt = load(t2_xt, t2_point.column, "x_tilde", m);
            const Sample yt_train = load(t2_yt, t2_point.column, "y_tilde", m);
            const double y = t2_point.resolve_y();
            t2_point.record(m, y);
            m.flags()["schedule"] = t2_sched.to_json();
            const SortedSample xs = sort_sample(x);
            const SortedSample xts = sort_sample(xt);
            const EmpiricalCdf fy(sort_sample(y_train));
            const EmpiricalCdf fyt(sort_sample(yt_train));
            const TestResult r = t2_statistic(Case2Inputs{xs, xts, fy, fyt, t2_sched.schedule(), y}, t2_point.alpha);
            out << to_json(r).dump(2) << '\n';
            m.emit(t2_point.manifest, err);
            return kExitOk;
        }
        if (sim->parsed()) {
            Manifest m("simulate");
            RunOptions opts;
            opts.threads = sim_threads ? *sim_threads : threads_from_env();
            opts.alpha = sim_alpha;
            opts.schedule = sim_sched.schedule();
            opts.local_base = sim_local_base == "m" ? LocalBase::EffectiveSize : LocalBase::SampleSize;
            if (sim_sizes.empty() || std::any_of(sim_sizes.begin(), sim_sizes.end(), [](std::size_t n) { return n < 2; })) {
                throw ParseError("--sizes: every size must be at least 2");
            }

            SimulationReport report;
            if (sim_table == "1") {
                report = run_table1(sim_seed, sim_reps, sim_sizes, opts);
            } else if (sim_table == "3") {
                report = run_table3(sim_seed, sim_reps, sim_sizes, opts);
            } else if (sim_table == "4") {
                report = run_table4(sim_seed, sim_reps, sim_sizes, sim_betas, opts);
            } else {
                report.seed = sim_seed;
                for (std::size_t n : sim_sizes) {
                    ScenarioConfig cfg;
                    cfg.statistic = sim_statistic == "T1" ? Statistic::T1 : Statistic::T2;
                    cfg.g = transform_by_name(sim_g, sim_beta, sim_slope, sim_intercept);
                    cfg.g_tilde = transform_by_name(sim_gt, sim_beta, sim_slope, sim_intercept);
                    cfg.sizes = SampleSizes::equal(n);
                    cfg.replications = sim_reps;
                    cfg.alpha = sim_alpha;
                    cfg.seed = scenario_seed(sim_seed, "custom/n=" + std::to_string(n));
                    cfg.schedule = opts.schedule;
                    cfg.local_base = opts.local_base;
                    cfg.fixed_y = sim_fixed_y;
                    ScenarioResult r = run_scenario(cfg, opts);
                    r.table = "custom";
                    report.scenarios.push_back(std::move(r));
                }
            }

            m.set("seed", sim_seed);
            m.flags() = {{"table", sim_table},
                         {"reps", sim_reps},
                         {"sizes", sim_sizes},
                         {"betas", sim_betas},
                         {"threads", opts.threads},
                         {"local_base", sim_local_base},
                         {"alpha", sim_alpha},
                         {"schedule", sim_sched.to_json()},
                         {"out", sim_out}};
            if (sim_table == "custom") {
                m.flags()["statistic"] = sim_statistic;
                m.flags()["g"] = sim_g;
                m.flags()["g_tilde"] = sim_gt;
                m.flags()["beta"] = sim_beta;
                m.flags()["slope"] = sim_slope;
                m.flags()["intercept"] = sim_intercept;
                m.flags()["fixed_y"] = sim_fixed_y ? json(*sim_fixed_y) : json(nullptr);
            }
            m.set("wall_seconds", report.wall_seconds);

            const std::string csv = simulation_csv(report);
            if (sim_out.empty()) {
                out << csv;
                m.emit("", err);
            } else {
                const fs::path csv_path(sim_out);
                fs::path json_path = csv_path;
                json_path.replace_extension(".json");
                fs::path manifest_path = csv_path;
                manifest_path.replace_extension(".manifest.json");
                Manifest::write_file(csv_path, csv);
                Manifest::write_file(json_path, to_json(report).dump(2) + "\n");
                m.emit(fs_string(manifest_path), err);
                out << "wrote " << csv_path.string() << ", " << json_path.string() << ", "
                    << manifest_path.string() << '\n';
            }
            return kExitOk;
        }
        if (an->parsed()) {
            Manifest m("analyze");
            auto col = [&](const std::string& specific) { return specific.empty() ? an_column : specific; };
            const Sample x = load(an_x, col(an_col_x), "x", m);
            const Sample y = load(an_y, col(an_col_y), "y", m);
            const Sample xt = load(an_xt, col(an_col_xt), "x_tilde", m);
            const Sample yt = load(an_yt, col(an_col_yt), "y_tilde", m);
            if (!(an_window[0] < an_window[1])) {
                throw ParseError("--window: lo must be below hi");
            }
            AnalysisOptions opts;
            opts.grid_points = an_points;
            opts.window_lo = an_window[0];
            opts.window_hi = an_window[1];
            opts.alpha = an_alpha;
            opts.schedule = an_sched.schedule();
            opts.test_point = an_test_y;
            const AnalysisResult r = analyze(x, y, xt, yt, opts);

            const std::string p = an_prefix;
            Manifest::write_file(p + "_grid.csv", grid_csv(r.grid));
            Manifest::write_file(p + "_grid.svg", grid_svg(r.grid));
            Manifest::write_file(p + "_fits.json", to_json(r, opts).dump(2) + "\n");
            Manifest::write_file(p + "_moments.txt", moment_table(r));
            Manifest::write_file(p + "_density.csv",
                                 density_csv({{"x", &x}, {"y", &y}, {"x_tilde", &xt}, {"y_tilde", &yt}}));
            m.flags() = {{"grid_points", an_points},
                         {"window", an_window},
                         {"alpha", an_alpha},
                         {"test_y", an_test_y ? json(*an_test_y) : json(nullptr)},
                         {"column", an_column},
                         {"schedule", an_sched.to_json()},
                         {"out_prefix", an_prefix}};
            m.set("seed", nullptr);
            m.emit(p + "_manifest.json", err);
            out << moment_table(r);
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DegeneratePointError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const NoOverlapError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoOverlap;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace xformtest
