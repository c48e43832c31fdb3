#include "xformtest/cli.hpp"
#include "xformtest/distributions.hpp"
#include "xformtest/random.hpp"

#include <catch_amalgamated.hpp>
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace xformtest;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
  public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("xformtest_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream f(file(name));
        f << text;
        return file(name);
    }

    std::string write_values(const std::string& name, const std::vector<double>& v, bool header = true) const {
        std::ostringstream s;
        if (header) {
            s << "value\n";
        }
        s.precision(17);
        for (double x : v) {
            s << x << '\n';
        }
        return write(name, s.str());
    }

  private:
    fs::path path_;
};

std::vector<double> draws(std::uint64_t seed, std::size_t n, double (*g)(double)) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = g(normal_sample(rng));
    }
    return v;
}

double null_g(double y) {
    return std::exp((y + 3) / (y + 5));
}

double g4(double y) {
    return 4 * y + 5;
}

double identity(double y) {
    return y;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("test1 with identical files", "[cli]") {
    TempDir dir;
    const auto x = dir.write_values("x.csv", draws(1, 200, null_g));
    const auto r = cli({"test1", "--x", x, "--x-tilde", x, "--at", "0", "--manifest", dir.file("m.json")});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["statistic"] == 0.0);
    CHECK(j["p_value"] == 1.0);
    CHECK(j["case"] == 1);
    for (const char* key : {"y", "g_hat", "g_tilde_hat", "sigma2_hat", "reject", "alpha", "n", "n_tilde"}) {
        CHECK(j.contains(key));
    }
    const auto m = json::parse(slurp(dir.file("m.json")));
    CHECK(m["command"] == "test1");
    CHECK(m["inputs"].size() == 2);
    CHECK(m["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(m["evaluation_point"] == 0.0);
}

TEST_CASE("test1 random point is seeded and recorded", "[cli]") {
    TempDir dir;
    const auto x = dir.write_values("x.csv", draws(2, 200, null_g));
    const auto xt = dir.write_values("xt.csv", draws(3, 200, null_g));
    const auto a = cli({"test1", "--x", x, "--x-tilde", xt, "--seed", "5", "--manifest", dir.file("a.json")});
    const auto b = cli({"test1", "--x", x, "--x-tilde", xt, "--seed", "5", "--manifest", dir.file("b.json")});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto m = json::parse(slurp(dir.file("a.json")));
    CHECK(m["evaluation_point"] == json::parse(a.out)["y"]);
    CHECK(m["seed"] == 5);
}

TEST_CASE("test1 exit codes", "[cli]") {
    TempDir dir;
    const auto x = dir.write_values("x.csv", draws(4, 100, identity));
    const auto table = dir.write("ref.csv", "p,q\n0,-1\n0.5,0\n1,1\n");
    CHECK(cli({"test1", "--x", x, "--x-tilde", x, "--ref", table, "--at", "3", "--manifest", dir.file("m.json")})
              .code == 3);
    CHECK(cli({"test1", "--x", x, "--x-tilde", x, "--ref", table, "--at", "0.2", "--manifest", dir.file("m.json")})
              .code == 0);
    CHECK(cli({"test1", "--x", dir.write("bad.csv", "v\n1\nfoo\n"), "--x-tilde", x}).code == 2);
    CHECK(cli({"test1", "--x", dir.write("empty.csv", ""), "--x-tilde", x}).code == 2);
    CHECK(cli({"test1", "--x", dir.file("missing.csv"), "--x-tilde", x}).code == 2);
    CHECK(cli({"test1", "--x", x}).code == 2);
    CHECK(cli({"test1", "--x", x, "--x-tilde", x, "--at", "abc"}).code == 2);
    CHECK(cli({"test1", "--x", x, "--x-tilde", x, "--alpha", "2"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"--version"}).out == std::string(version()) + "\n");
}

TEST_CASE("test2", "[cli]") {
    TempDir dir;
    const auto x = dir.write_values("x.csv", draws(5, 300, null_g));
    const auto y = dir.write_values("y.csv", draws(6, 300, identity));
    const auto r = cli({"test2", "--x", x, "--y", y, "--x-tilde", x, "--y-tilde", y, "--at", "0.1", "--manifest",
                        dir.file("m.json")});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["statistic"] == 0.0);
    CHECK(j["case"] == 2);

    const auto xt = dir.write_values("xt.csv", draws(7, 500, g4));
    const auto x5 = dir.write_values("x5.csv", draws(8, 500, null_g));
    const auto y5 = dir.write_values("y5.csv", draws(9, 500, identity));
    const auto yt5 = dir.write_values("yt5.csv", draws(10, 500, identity));
    const auto alt = cli({"test2", "--x", x5, "--y", y5, "--x-tilde", xt, "--y-tilde", yt5, "--at", "0.3",
                          "--manifest", dir.file("m.json")});
    REQUIRE(alt.code == 0);
    CHECK(json::parse(alt.out)["reject"] == true);

    CHECK(cli({"test2", "--x", x, "--y", dir.write("e.csv", ""), "--x-tilde", x, "--y-tilde", y}).code == 2);
    CHECK(cli({"test2", "--x", x, "--y", y, "--x-tilde", x, "--y-tilde", y, "--at", "50", "--manifest",
               dir.file("m.json")})
              .code == 3);
}

TEST_CASE("simulate is byte-reproducible across runs and threads", "[cli]") {
    TempDir dir;
    const auto a = cli({"simulate", "--table", "3", "--reps", "40", "--sizes", "30,60", "--seed", "42", "--out",
                        dir.file("a.csv"), "--threads", "1"});
    const auto b = cli({"simulate", "--table", "3", "--reps", "40", "--sizes", "30,60", "--seed", "42", "--out",
                        dir.file("b.csv"), "--threads", "8"});
    const auto c = cli({"simulate", "--table", "3", "--reps", "40", "--sizes", "30,60", "--seed", "42", "--out",
                        dir.file("c.csv"), "--threads", "1"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("c.csv")));
    CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
    CHECK(fs::exists(dir.file("a.manifest.json")));
    CHECK(slurp(dir.file("a.csv")).rfind("case,statistic,alternative,n,beta,replications,reject_pct,retries,seed\n", 0) ==
          0);
}

TEST_CASE("simulate table 4 has three beta columns", "[cli]") {
    const auto r = cli({"simulate", "--table", "4", "--reps", "5", "--sizes", "20"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",g5,20,0.25,") != std::string::npos);
    CHECK(r.out.find(",g5,20,0.5,") != std::string::npos);
    CHECK(r.out.find(",g5,20,4,") != std::string::npos);
}

TEST_CASE("simulate flags", "[cli]") {
    CHECK(cli({"simulate", "--table", "2"}).code == 2);
    CHECK(cli({"simulate"}).code == 2);
    CHECK(cli({"simulate", "--table", "1", "--reps", "0"}).code == 2);
    CHECK(cli({"simulate", "--table", "1", "--sizes", "1"}).code == 2);
    CHECK(cli({"simulate", "--table", "1", "--threads", "0"}).code == 2);
    CHECK(cli({"simulate", "--table", "custom", "--g-tilde", "g9", "--reps", "3", "--sizes", "20"}).code == 2);
    const auto custom = cli({"simulate", "--table", "custom", "--statistic", "T2", "--g-tilde", "affine", "--slope",
                             "2", "--intercept", "1", "--reps", "10", "--sizes", "40"});
    REQUIRE(custom.code == 0);
    CHECK(custom.out.find("2,T2,affine,40,,10,") != std::string::npos);
}

TEST_CASE("thread count from the environment", "[cli]") {
    ::setenv("XFORMTEST_THREADS", "4", 1);
    const auto a = cli({"simulate", "--table", "1", "--reps", "30", "--sizes", "30"});
    ::setenv("XFORMTEST_THREADS", "zero", 1);
    const auto bad = cli({"simulate", "--table", "1", "--reps", "30", "--sizes", "30"});
    ::unsetenv("XFORMTEST_THREADS");
    const auto b = cli({"simulate", "--table", "1", "--reps", "30", "--sizes", "30"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(bad.code == 2);
    CHECK(json::parse(a.err)["flags"]["threads"] == 4);
}

TEST_CASE("analyze writes its outputs", "[cli]") {
    TempDir dir;
    Rng rng(77);
    std::vector<double> y(1615);
    std::vector<double> yt(1615);
    std::vector<double> x(1615);
    std::vector<double> xt(1615);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = 150 + 20 * normal_sample(rng);
        yt[i] = 132 + 20 * normal_sample(rng);
        x[i] = 0.99 * y[i] + 0.7 + (rng.uniform() - 0.5);
        xt[i] = 0.99 * yt[i] + 0.7 + (rng.uniform() - 0.5);
    }
    std::ostringstream both;
    both.precision(17);
    both << "sbp_before,sbp_after\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        both << y[i] << ',' << x[i] << '\n';
    }
    const auto paired = dir.write("paired.csv", both.str());
    const auto ytf = dir.write_values("yt.csv", yt);
    const auto xtf = dir.write_values("xt.csv", xt);
    const auto prefix = dir.file("out");
    const auto r = cli({"analyze", "--x", paired, "--x-column", "sbp_after", "--y", paired, "--y-column",
                        "sbp_before", "--x-tilde", xtf, "--y-tilde", ytf, "--out-prefix", prefix});
    REQUIRE(r.code == 0);
    for (const char* suffix : {"_grid.csv", "_grid.svg", "_fits.json", "_moments.txt", "_density.csv", "_manifest.json"}) {
        CHECK(fs::exists(prefix + suffix));
    }
    const auto fits = json::parse(slurp(prefix + "_fits.json"));
    CHECK(std::fabs(fits["fits"]["g"]["slope"].get<double>() - 0.99) < 0.05);
    CHECK(fits["parametric"]["g"].is_object());
    const auto grid = slurp(prefix + "_grid.csv");
    CHECK(grid.rfind("y,g_hat,g_tilde_hat,g0_hat\n", 0) == 0);

    // Equal sizes: g0 is the midpoint of g and g~.
    std::istringstream lines(grid);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        double v[4];
        std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]);
        CHECK(std::fabs(v[3] - 0.5 * (v[1] + v[2])) <= 1e-12 * std::fabs(v[3]));
    }

    // Same inputs, same numeric outputs.
    const auto again = cli({"analyze", "--x", paired, "--x-column", "sbp_after", "--y", paired, "--y-column",
                            "sbp_before", "--x-tilde", xtf, "--y-tilde", ytf, "--out-prefix", prefix + "2"});
    REQUIRE(again.code == 0);
    CHECK(slurp(prefix + "_grid.csv") == slurp(prefix + "2_grid.csv"));
    CHECK(slurp(prefix + "_fits.json") == slurp(prefix + "2_fits.json"));
}

TEST_CASE("analyze with disjoint training ranges", "[cli]") {
    TempDir dir;
    const auto a = dir.write("a.csv", "1\n2\n3\n4\n");
    const auto b = dir.write("b.csv", "10\n11\n12\n13\n");
    CHECK(cli({"analyze", "--x", a, "--y", a, "--x-tilde", b, "--y-tilde", b, "--out-prefix", dir.file("o")}).code ==
          4);
    CHECK(cli({"analyze", "--x", a, "--y", a, "--x-tilde", b, "--y-tilde", b}).code == 2);
}
