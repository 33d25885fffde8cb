#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "randeq/base.hpp"

using namespace randeq;

TEST_CASE("single-letter alphabet yields all zeros") {
    BaseSystem bs(1, {1.0});
    auto orbit = sample_orbit(bs, 42, 2, 2);
    REQUIRE(orbit.length() == 5);
    for (int j = -2; j <= 2; ++j) CHECK(symbol_at(orbit, j) == 0);
}

TEST_CASE("degenerate law (1,0) yields all zeros") {
    BaseSystem bs(2, {1.0, 0.0});
    auto orbit = sample_orbit(bs, 123, 0, 10);
    for (int j = 0; j <= 10; ++j) CHECK(symbol_at(orbit, j) == 0);
}

TEST_CASE("fair coin frequency within 3 binomial standard deviations") {
    // oracle: sd of the empirical frequency is sqrt(p(1-p)/n)
    const int n = 100000;
    BaseSystem bs(2, {0.5, 0.5});
    auto orbit = sample_orbit(bs, 2026, 0, n);
    int ones = 0;
    for (int j = 0; j < n; ++j) ones += symbol_at(orbit, j);
    double freq = static_cast<double>(ones) / n;
    double sd = std::sqrt(0.25 / n);
    CHECK(std::fabs(freq - 0.5) <= 3.0 * sd);
}

TEST_CASE("seed determinism") {
    BaseSystem bs(3, {0.2, 0.5, 0.3});
    auto a = sample_orbit(bs, 777, 5, 50);
    auto b = sample_orbit(bs, 777, 5, 50);
    REQUIRE(a.symbols == b.symbols);
    auto c = sample_orbit(bs, 778, 5, 50);
    CHECK(a.symbols != c.symbols);
}

TEST_CASE("zero-length window rejected") {
    BaseSystem bs(2, {0.5, 0.5});
    CHECK_THROWS_AS(sample_orbit(bs, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("window indexing and boundary contract") {
    BaseSystem bs(2, {0.5, 0.5});
    auto orbit = sample_orbit(bs, 5, 3, 4);
    CHECK(orbit.symbol_at(0) == orbit.symbols[3]);
    CHECK(orbit.symbol_at(1) == orbit.symbols[4]);
    CHECK_THROWS_AS(orbit.symbol_at(-4), std::out_of_range);
    CHECK_THROWS_AS(orbit.symbol_at(5), std::out_of_range);
}

TEST_CASE("shift consistency") {
    BaseSystem bs(2, {0.3, 0.7});
    auto orbit = sample_orbit(bs, 99, 4, 20);
    auto shifted = orbit.shifted(1);
    for (int j = -4; j < 20; ++j)
        CHECK(symbol_at(orbit, j + 1) == symbol_at(shifted, j));
}

TEST_CASE("birkhoff_average basics") {
    BaseSystem bs(2, {0.5, 0.5});
    auto orbit = sample_orbit(bs, 11, 0, 100);
    std::vector<double> table{3.25, 3.25};
    for (int n : {1, 7, 100})
        CHECK(birkhoff_average(orbit, table, n) == Catch::Approx(3.25).epsilon(1e-15));

    std::vector<double> one_term{1.5, -2.5};
    CHECK(birkhoff_average(orbit, one_term, 1) ==
          one_term[static_cast<std::size_t>(symbol_at(orbit, 0))]);
    CHECK_THROWS_AS(birkhoff_average(orbit, one_term, 101), std::out_of_range);
}

TEST_CASE("birkhoff_average of log-degrees approaches the mean") {
    // oracle: CLT bound, sd = 0.5 |log3 - log2| / sqrt(n); 0.02 is ~10 sigma
    const int n = 10000;
    BaseSystem bs(2, {0.5, 0.5});
    auto orbit = sample_orbit(bs, 31337, 0, n + 1);
    std::vector<double> table{std::log(2.0), std::log(3.0)};
    double avg = birkhoff_average(orbit, table, n);
    CHECK(std::fabs(avg - 0.5 * (std::log(2.0) + std::log(3.0))) <= 0.02);
}

TEST_CASE("law of large numbers for symbol indicators") {
    const int n = 100000;
    BaseSystem bs(3, {0.2, 0.5, 0.3});
    auto orbit = sample_orbit(bs, 4242, 0, n);
    for (int s = 0; s < 3; ++s) {
        std::vector<double> ind(3, 0.0);
        ind[static_cast<std::size_t>(s)] = 1.0;
        double freq = birkhoff_average(orbit, ind, n);
        double p = bs.symbol_probabilities[static_cast<std::size_t>(s)];
        CHECK(std::fabs(freq - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("invalid base systems rejected") {
    CHECK_THROWS_AS(BaseSystem(2, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(BaseSystem(2, {1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(BaseSystem(2, {1.0}), std::invalid_argument);
}
