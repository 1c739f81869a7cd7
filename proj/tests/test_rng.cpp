#include <catch2/catch_amalgamated.hpp>

#include "pfopt/rng.hpp"

using pfopt::RngStream;

TEST_CASE("identical (seed, stream) pairs replay the same sequence") {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams of one seed diverge") {
    RngStream a(42, 1), b(42, 2);
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u32() == b.next_u32()) ++same;
    REQUIRE(same < 4);
}

TEST_CASE("substreams depend on identity, not on draws already made") {
    RngStream a(9, 3), b(9, 3);
    for (int i = 0; i < 17; ++i) (void)b.next_u32();
    RngStream sa = a.substream(5), sb = b.substream(5);
    for (int i = 0; i < 100; ++i) REQUIRE(sa.next_u64() == sb.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) and fills the interval") {
    RngStream r(1, 0);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("normal draws match N(0,1) moments") {
    RngStream r(3, 11);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = r.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(var == Catch::Approx(1.0).margin(0.02));
}
