#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "randeq/fiber.hpp"

using namespace randeq;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("eval of the doubling lift") {
    auto f = make_linear_map(2);
    CHECK(eval(f, 0.3) == Catch::Approx(0.6).margin(1e-15));
    CHECK(eval(f, 0.75) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("eval of a sine lift against extended-precision evaluation") {
    auto f = make_sine_map(2, 0.3);
    double x = 0.25;
    long double lift = 2.0L * x + 0.3L * sinl(2.0L * static_cast<long double>(kPi) * x) /
                                      (2.0L * static_cast<long double>(kPi));
    long double wrapped = lift - floorl(lift);
    CHECK(eval(f, x) == Catch::Approx(static_cast<double>(wrapped)).margin(1e-14));
}

TEST_CASE("preimages of linear maps") {
    auto f2 = make_linear_map(2);
    auto p2 = preimages(f2, 0.5);
    REQUIRE(p2.size() == 2);
    CHECK(p2[0] == Catch::Approx(0.25).margin(1e-13));
    CHECK(p2[1] == Catch::Approx(0.75).margin(1e-13));

    auto f3 = make_linear_map(3);
    auto p3 = preimages(f3, 0.0);
    REQUIRE(p3.size() == 3);
    CHECK(p3[0] == Catch::Approx(0.0).margin(1e-13));
    CHECK(p3[1] == Catch::Approx(1.0 / 3).margin(1e-13));
    CHECK(p3[2] == Catch::Approx(2.0 / 3).margin(1e-13));
}

TEST_CASE("preimages of a sine lift satisfy the branch residual") {
    auto f = make_sine_map(2, 0.3);
    auto ps = preimages(f, 0.37, 1e-12);
    REQUIRE(ps.size() == 2);
    for (double y : ps) CHECK(circle_dist(eval(f, y), 0.37) <= 1e-12);
}

TEST_CASE("preimage round trip and branch order on a 1024-grid") {
    for (auto f : {make_sine_map(2, 0.5), make_sine_map(3, 0.8), make_manneville_map(0.5)}) {
        for (int i = 0; i < 1024; ++i) {
            double x = i / 1024.0;
            auto ps = preimages(f, x, 1e-12);
            REQUIRE(static_cast<int>(ps.size()) == f.degree);
            for (std::size_t b = 1; b < ps.size(); ++b) CHECK(ps[b] > ps[b - 1]);
            for (double y : ps) CHECK(circle_dist(eval(f, y), x) <= 1e-10);
        }
    }
}

TEST_CASE("expansion constant of the doubling map") {
    auto f = make_linear_map(2);
    CHECK(expansion_constant(f, 0.13, 0.01) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("expansion constant against a dense probing oracle") {
    auto f = make_sine_map(2, 1.2);   // G' = 2 + 1.2 cos(2 pi x)
    double r = 0.01;
    for (double x : {0.0, 0.3, 0.5, 0.77}) {
        double dense = 0.0;
        for (int i = 0; i <= 4096; ++i) {
            double u = x - r + 2.0 * r * i / 4096;
            dense = std::max(dense, 1.0 / f.derivative(wrap01(u)));
        }
        double got = expansion_constant(f, x, r);
        CHECK(got == Catch::Approx(dense).epsilon(1e-4));
        CHECK(got >= 1.0 / (2.0 + 1.2 * std::cos(2 * kPi * x)) - 1e-12);
    }
}

TEST_CASE("expansion constant is monotone in the probe radius") {
    auto f = make_sine_map(2, 1.2);
    double prev = 0.0;
    for (double r : {0.001, 0.005, 0.02, 0.05, 0.1}) {
        double v = expansion_constant(f, 0.4, r);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("Manneville-Pomeau neutral fixed point") {
    auto f = make_manneville_map(0.5);
    CHECK(f.derivative(0.0) == Catch::Approx(1.0).margin(1e-15));
    // away from 0 the probe window misses the neutral point: value < 1,
    // increasing back toward 1 as x -> 0
    double a = expansion_constant(f, 0.05, 0.004);
    double b = expansion_constant(f, 0.02, 0.004);
    double c = expansion_constant(f, 0.01, 0.004);
    CHECK(a < 1.0);
    CHECK(b < 1.0);
    CHECK(c < 1.0);
    CHECK(a < b);
    CHECK(b < c);
    // window containing 0 hits G'(0) = 1 exactly
    CHECK(expansion_constant(f, 0.0, 0.004) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("doubling profile has empty bad region for every sigma < 2") {
    auto f = make_linear_map(2);
    for (double sigma : {1.1, 1.3, 1.5, 1.7, 1.9, 1.99}) {
        auto prof = build_expansion_profile(f, sigma, 1.0, 512);
        CHECK(prof.bad_region.empty());
        CHECK(prof.q == 1);
        CHECK(prof.p == 1);
        CHECK(prof.cond_I_ok);
        CHECK(prof.cond_II_ok);
    }
}

TEST_CASE("sine a=1.2 profile: bad region straddles the branch boundary") {
    // oracle: {G' <= 1.25} = {cos(2 pi x) <= -0.625}, one interval centered
    // at 1/2 with endpoints acos(-0.625)/(2 pi) and its mirror
    auto f = make_sine_map(2, 1.2);
    auto prof = build_expansion_profile(f, 1.25, 1.3, 2048);
    REQUIRE(prof.bad_region.size() == 1);
    double x1 = std::acos(-0.625) / (2 * kPi);
    double x2 = 1.0 - x1;
    CHECK(prof.bad_region[0].lo == Catch::Approx(x1).margin(4.0 / 2048));
    CHECK(prof.bad_region[0].hi == Catch::Approx(x2).margin(4.0 / 2048));
    CHECK(prof.in_bad_region(0.5));
    CHECK_FALSE(prof.in_bad_region(0.05));
    // the bad interval has small lift image, so one injectivity arc covers it
    CHECK(prof.q == 1);
    CHECK(prof.p == 1);
    CHECK(prof.cond_II_ok);
}

TEST_CASE("bad region covering the whole circle fails condition (II)") {
    auto f = make_sine_map(2, 0.5);
    auto prof = build_expansion_profile(f, 5.0, 2.0, 1024);
    REQUIRE(prof.bad_region.size() == 1);
    CHECK(prof.bad_region[0].length() >= 1.0 - 2.0 / 1024);
    CHECK(prof.q == 2);
    CHECK(prof.p == 0);
    CHECK_FALSE(prof.cond_II_ok);
}

TEST_CASE("Manneville profile: bad region at the neutral point, q=1") {
    auto f = make_manneville_map(0.5);
    auto prof = build_expansion_profile(f, 1.2, 1.0, 2048);
    REQUIRE_FALSE(prof.bad_region.empty());
    CHECK(prof.in_bad_region(0.0));
    CHECK_FALSE(prof.in_bad_region(0.3));
    CHECK(prof.q == 1);
    CHECK(prof.p == 1);
    CHECK(prof.cond_I_ok);
    CHECK(prof.cond_II_ok);
}

TEST_CASE("non-monotone lifts are rejected") {
    auto bad = make_sine_map(2, 2.5);   // G' dips negative
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("lift degree mismatch is rejected") {
    FiberMap f;
    f.degree = 3;
    f.lift = [](double x) { return 2.0 * x; };
    f.derivative = [](double) { return 2.0; };
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("potential caches agree exactly at grid nodes") {
    auto pot = make_cosine_potential(512, 0.1, 1, 1.0, 0.01);
    for (int i = 0; i < 512; ++i)
        CHECK(pot.cache[i] == pot.value(i / 512.0));
    CHECK(pot.inf_value == -0.1);
    CHECK(pot.sup_value == 0.1);
}

TEST_CASE("tabulated lift reproduces its source map") {
    auto src = make_sine_map(2, 0.5);
    LiftTable table;
    for (int i = 0; i <= 4096; ++i) {
        double x = i / 4096.0;
        table.x.push_back(x);
        table.g.push_back(src.lift(x));
        table.dg.push_back(src.derivative(x));
    }
    auto f = make_tabulated_map(std::move(table), "tab");
    f.validate();
    CHECK(f.degree == 2);
    for (double x : {0.1, 0.33, 0.5, 0.92})
        CHECK(eval(f, x) == Catch::Approx(eval(src, x)).margin(1e-7));
    auto ps = preimages(f, 0.4, 1e-9);
    for (double y : ps) CHECK(circle_dist(eval(f, y), 0.4) <= 1e-9);
}
