#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "randeq/cone.hpp"
#include "randeq/grid.hpp"
#include "randeq/rng.hpp"

using namespace randeq;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction cone_sample(int n, std::uint64_t seed, std::uint64_t tag) {
    double a1 = 0.05 + 0.1 * rng_uniform01(seed, 4 * tag);
    double p1 = rng_uniform01(seed, 4 * tag + 1);
    double a2 = 0.05 * rng_uniform01(seed, 4 * tag + 2);
    double p2 = rng_uniform01(seed, 4 * tag + 3);
    return GridFunction(n, [&](double x) {
        return 1.0 + a1 * std::cos(2 * kPi * (x + p1)) + a2 * std::sin(4 * kPi * (x + p2));
    });
}

} // namespace

TEST_CASE("interpolation is exact at nodes and circular") {
    GridFunction g(8);
    for (int i = 0; i < 8; ++i) g[i] = i * i;
    for (int i = 0; i < 8; ++i) CHECK(g.interp(i / 8.0) == g[i]);
    // between last and first node the interpolation wraps
    CHECK(g.interp(7.5 / 8.0) == Catch::Approx(0.5 * (g[7] + g[0])));
}

TEST_CASE("holder seminorm of a constant is zero") {
    GridFunction g(256, 4.2);
    CHECK(holder_seminorm(g, 1.0, 0.05) == 0.0);
}

TEST_CASE("holder seminorm of a piecewise-linear hat equals its slope") {
    const int n = 256;
    const double slope = 3.0;
    GridFunction g(n, [&](double x) { return slope * circle_dist(x, 0.0); });
    // delta spanning one linear piece only
    CHECK(holder_seminorm(g, 1.0, 3.0 / n) == Catch::Approx(slope).epsilon(1e-12));
}

TEST_CASE("holder seminorm of cos(2 pi x) approximates 2 pi") {
    // oracle: sup |g'| = 2 pi, attained at the zero crossings
    GridFunction g(4096, [](double x) { return std::cos(2 * kPi * x); });
    double s = holder_seminorm(g, 1.0, 0.05);
    CHECK(s == Catch::Approx(2 * kPi).epsilon(0.01));
    CHECK(s <= 2 * kPi + 1e-9);
}

TEST_CASE("holder seminorm rejects delta below grid resolution") {
    GridFunction g(256, 1.0);
    CHECK_THROWS_AS(holder_seminorm(g, 1.0, 1.0 / 512), std::invalid_argument);
}

TEST_CASE("holder seminorm is subadditive") {
    for (std::uint64_t t = 0; t < 8; ++t) {
        auto f = cone_sample(512, 7, 2 * t);
        auto g = cone_sample(512, 7, 2 * t + 1);
        GridFunction sum(512);
        for (int i = 0; i < 512; ++i) sum[i] = f[i] + g[i];
        double sf = holder_seminorm(f, 1.0, 0.05);
        double sg = holder_seminorm(g, 1.0, 0.05);
        double ss = holder_seminorm(sum, 1.0, 0.05);
        CHECK(ss <= sf + sg + 1e-12);
    }
}

TEST_CASE("covering constant m and globalized seminorms") {
    CHECK(ConeParams(1.0, 0.05, 100.0).m() == 11);
    CHECK(ConeParams(1.0, 0.5, 100.0).m() == 2);
    CHECK(globalize_seminorm(0.0, ConeParams(1.0, 0.05, 100.0)) == 0.0);
    CHECK(globalize_seminorm(3.0, ConeParams(1.0, 0.05, 100.0)) == 33.0);
    CHECK(globalize_seminorm(3.0, ConeParams(1.0, 0.5, 100.0)) == 6.0);
}

TEST_CASE("cone membership") {
    ConeParams cone(1.0, 0.05, 100.0);
    GridFunction one(1024, 1.0);
    auto [in1, m1] = cone_member(one, cone);
    CHECK(in1);
    CHECK(m1 == Catch::Approx(100.0));

    GridFunction g(4096, [](double x) { return std::cos(2 * kPi * x) + 2.0; });
    auto [in2, m2] = cone_member(g, cone);
    CHECK(in2);
    CHECK(m2 == Catch::Approx(100.0 - 2 * kPi).epsilon(1e-3));

    GridFunction zeroed(256, [](double x) { return std::cos(2 * kPi * x) + 1.0; });
    auto [in3, m3] = cone_member(zeroed, cone);
    CHECK_FALSE(in3);
    CHECK(m3 == -std::numeric_limits<double>::infinity());
}

TEST_CASE("theta metric vanishes exactly on rays") {
    ConeParams cone(1.0, 0.05, 100.0);
    auto phi = cone_sample(512, 9, 0);
    GridFunction two_phi(512);
    for (int i = 0; i < 512; ++i) two_phi[i] = 2.0 * phi[i];
    CHECK(theta_metric(phi, two_phi, cone).value == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("theta metric is symmetric") {
    ConeParams cone(1.0, 0.05, 100.0);
    for (std::uint64_t t = 0; t < 4; ++t) {
        auto f = cone_sample(512, 17, 2 * t);
        auto g = cone_sample(512, 17, 2 * t + 1);
        double a = theta_metric(f, g, cone).value;
        double b = theta_metric(g, f, cone).value;
        CHECK(a == Catch::Approx(b).margin(1e-12));
    }
}

TEST_CASE("theta metric against a denser-sampled oracle") {
    // same formula evaluated on a 4x denser triple family
    GridFunction ones(512, 1.0);
    GridFunction pert(512, [](double x) { return 1.0 + 0.1 * std::cos(2 * kPi * x); });
    ConeParams coarse(1.0, 0.05, 100.0);
    coarse.z_subgrid = 256;
    double v = theta_metric(ones, pert, coarse).value;

    GridFunction ones2(2048, 1.0);
    GridFunction pert2(2048, [](double x) { return 1.0 + 0.1 * std::cos(2 * kPi * x); });
    ConeParams fine(1.0, 0.05, 100.0);
    fine.z_subgrid = 2048;
    double oracle = theta_metric(ones2, pert2, fine).value;
    CHECK(v == Catch::Approx(oracle).epsilon(0.02));
}

TEST_CASE("projective scaling invariance") {
    ConeParams cone(1.0, 0.05, 100.0);
    auto f = cone_sample(512, 23, 0);
    auto g = cone_sample(512, 23, 1);
    double base = theta_metric(f, g, cone).value;
    GridFunction fa(512), gb(512);
    for (int i = 0; i < 512; ++i) {
        fa[i] = 3.7 * f[i];
        gb[i] = 0.2 * g[i];
    }
    CHECK(theta_metric(fa, gb, cone).value == Catch::Approx(base).margin(1e-10));
}

TEST_CASE("theta metric decreases when the cone widens") {
    auto f = cone_sample(512, 29, 0);
    auto g = cone_sample(512, 29, 1);
    double prev = std::numeric_limits<double>::infinity();
    for (double k : {20.0, 50.0, 100.0, 200.0}) {
        double v = theta_metric(f, g, ConeParams(1.0, 0.05, k)).value;
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("sup/inf bound for cone members") {
    ConeParams cone(1.0, 0.05, 100.0);
    double bound_factor = 1.0 + cone.m() * std::pow(kCircleDiameter, cone.alpha) * cone.k;
    for (std::uint64_t t = 0; t < 6; ++t) {
        auto g = cone_sample(1024, 31, t);
        REQUIRE(cone_member(g, cone).first);
        CHECK(g.max() <= g.min() * bound_factor);
    }
}

TEST_CASE("sandwich bounds bracket the grid ratio") {
    ConeParams cone(1.0, 0.05, 100.0);
    auto phi = cone_sample(512, 37, 0);

    SECTION("identical arguments") {
        auto t = theta_metric(phi, phi, cone);
        CHECK(t.A <= 1.0 + 1e-12);
        CHECK(t.B >= 1.0 - 1e-12);
        CHECK(sandwich_check(phi, phi, cone));
    }
    SECTION("scaled pair phi vs 2 phi") {
        GridFunction psi(512);
        for (int i = 0; i < 512; ++i) psi[i] = 2.0 * phi[i];
        // extremal coefficients of (phi, psi) pin the ratio psi/phi = 2
        auto t = theta_metric(phi, psi, cone);
        CHECK(t.A == Catch::Approx(2.0).margin(1e-12));
        CHECK(t.B == Catch::Approx(2.0).margin(1e-12));
        CHECK(sandwich_check(phi, psi, cone));
        CHECK(sandwich_check(psi, phi, cone));
    }
    SECTION("random cone pairs") {
        for (std::uint64_t t = 1; t < 5; ++t)
            CHECK(sandwich_check(phi, cone_sample(512, 41, t), cone));
    }
}

TEST_CASE("theta metric reports cone violations") {
    ConeParams cone(1.0, 0.05, 2.0);   // tight aperture
    GridFunction wiggly(512, [](double x) { return 1.0 + 0.9 * std::cos(2 * kPi * x); });
    GridFunction one(512, 1.0);
    CHECK_THROWS_AS(theta_metric(wiggly, one, cone), std::runtime_error);
}
