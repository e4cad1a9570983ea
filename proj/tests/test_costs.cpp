#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "costgreedy/costs.hpp"

using namespace costgreedy;

TEST_CASE("constant model") {
    const CostModel m = CostModel::constant(1.0);
    CHECK(m.mean() == 1.0);
    CHECK(m.unit_steps());
    for (std::uint32_t k = 1; k <= 5; ++k) CHECK(m.expected_min_of_k(k) == 1.0);
    SplitMix64 rng(1);
    for (int i = 0; i < 100; ++i) CHECK(m.sample(rng) == 1.0);
}

TEST_CASE("exponential model") {
    const CostModel m = CostModel::exponential(1.0);
    CHECK(m.mean() == 1.0);
    CHECK_FALSE(m.discrete());
    CHECK(m.expected_min_of_k(1) == 1.0);
    CHECK(m.expected_min_of_k(4) == 0.25);  // min of k Exp(lambda) ~ Exp(k lambda)

    SUBCASE("law of large numbers at 1e6 draws") {
        SplitMix64 rng(42);
        double sum = 0.0;
        for (int i = 0; i < 1000000; ++i) sum += m.sample(rng);
        CHECK(std::abs(sum / 1e6 - 1.0) < 0.01);
    }
    SUBCASE("Monte Carlo of min-of-4 against the closed form") {
        SplitMix64 rng(43);
        double sum = 0.0;
        const int draws = 1000000;
        for (int i = 0; i < draws; ++i) {
            double lo = m.sample(rng);
            for (int j = 1; j < 4; ++j) lo = std::min(lo, m.sample(rng));
            sum += lo;
        }
        // min of 4 is Exp(4): sd = 1/4, 3 standard errors at 1e6 draws
        CHECK(std::abs(sum / draws - 0.25) < 3.0 * 0.25 / 1000.0);
    }
}

TEST_CASE("two-point model") {
    const CostModel m = CostModel::two_point();
    CHECK(m.mean() == doctest::Approx(1.0));  // 2 * 1/2
    CHECK(m.discrete());
    // enumeration of the four outcomes: min is 2 only when both draws are 2
    CHECK(m.expected_min_of_k(2) == doctest::Approx(0.5));

    SplitMix64 rng(7);
    int zeros = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        if (m.sample(rng) == 0.0) ++zeros;
    CHECK(std::abs(zeros / static_cast<double>(draws) - 0.5) < 0.01);
}

TEST_CASE("discrete table model") {
    const CostModel m = CostModel::parse("table:3,0.7;1,0.3");  // sorted internally
    CHECK(m.support()[0] == 1.0);
    CHECK(m.mean() == doctest::Approx(2.4));
    // min of 2 draws is 3 only when both are 3
    CHECK(m.expected_min_of_k(2) == doctest::Approx(1.0 * 0.51 + 3.0 * 0.49));

    CHECK_THROWS_AS(CostModel::table({1.0}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(CostModel::table({-1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(CostModel::parse("nope:1"), std::invalid_argument);
}

TEST_CASE("expected min never exceeds the mean") {
    const CostModel models[] = {CostModel::constant(2.5), CostModel::exponential(0.5),
                                CostModel::two_point(),
                                CostModel::table({0.5, 2.0, 5.0}, {0.2, 0.5, 0.3})};
    for (const auto& m : models) {
        CHECK(m.expected_min_of_k(1) == doctest::Approx(m.mean()));
        double prev = m.mean();
        for (std::uint32_t k = 2; k <= 6; ++k) {
            const double e = m.expected_min_of_k(k);
            CHECK(e <= prev + 1e-12);  // non-increasing in k
            prev = e;
        }
    }
}

TEST_CASE("cost assignments are fresh per query and reproducible") {
    const CostModel m = CostModel::exponential(1.0);
    const CostAssignment a(m, 100), b(m, 100), c(m, 101);
    bool any_diff = false;
    for (EdgeId e = 0; e < 64; ++e) {
        CHECK(a(e) == b(e));
        any_diff |= a(e) != c(e);
    }
    CHECK(any_diff);

    SUBCASE("distinct seeds give uncorrelated values") {
        double sum_xy = 0, sum_x = 0, sum_y = 0, sum_xx = 0, sum_yy = 0;
        const int edges = 10000;
        for (EdgeId e = 0; e < edges; ++e) {
            const double x = a(e), y = c(e);
            sum_x += x;
            sum_y += y;
            sum_xx += x * x;
            sum_yy += y * y;
            sum_xy += x * y;
        }
        const double cov = sum_xy / edges - (sum_x / edges) * (sum_y / edges);
        const double vx = sum_xx / edges - (sum_x / edges) * (sum_x / edges);
        const double vy = sum_yy / edges - (sum_y / edges) * (sum_y / edges);
        CHECK(std::abs(cov / std::sqrt(vx * vy)) < 0.05);
    }

    SUBCASE("constant assignment is all ones") {
        const CostModel ones = CostModel::constant(1.0);
        const CostAssignment assign(ones, 5);
        const auto table = assign.materialize(32);
        for (double v : table) CHECK(v == 1.0);
    }
}

TEST_CASE("cost model parsing round-trips") {
    for (const std::string text :
         {"constant:1", "exp:1", "twopoint", "table:0.5,0.25;2,0.75"}) {
        const CostModel m = CostModel::parse(text);
        const CostModel again = CostModel::parse(m.to_string());
        CHECK(m.law() == again.law());
        CHECK(m.mean() == doctest::Approx(again.mean()));
    }
}
