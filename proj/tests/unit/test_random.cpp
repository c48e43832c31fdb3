#include "xformtest/random.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace xformtest;

TEST_CASE("splitmix64 reference vector", "[random]") {
    SplitMix64 sm(1234567);
    CHECK(sm() == 6457827717110365317ULL);
    CHECK(sm() == 3203168211198807973ULL);
    CHECK(sm() == 9817491932198370423ULL);
}

TEST_CASE("streams are reproducible and distinct", "[random]") {
    Rng a = make_stream(42, 3);
    Rng b = make_stream(42, 3);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a() == b());
    }
    std::set<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        firsts.insert(make_stream(42, i)());
    }
    CHECK(firsts.size() == 1000);
    CHECK(make_stream(1, 0)() != make_stream(2, 0)());
}

TEST_CASE("uniform doubles lie in [0,1)", "[random]") {
    Rng rng(9);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::fabs(sum / 100000 - 0.5) < 0.005);
}

TEST_CASE("label hash is FNV-1a", "[random]") {
    CHECK(label_hash("") == 0xcbf29ce484222325ULL);
    CHECK(label_hash("a") == 0xaf63dc4c8601ec8cULL);
}
