#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fep/stats.hpp"

using namespace fep;

// Reference endpoints computed independently with the beta-quantile form
// (scipy.stats.beta.ppf), frozen here.
TEST_CASE("endpoints match the independent reference") {
    struct Row {
        int64_t x, n;
        double low, high;
    };
    const Row rows[] = {
        {0, 258372, 0.0, 1.42772944454e-05},
        {0, 1, 0.0, 0.975},
        {60, 528, 0.0878450529796, 0.143843695875},
        {14376, 889375, 0.0159030887837, 0.0164283897239},
        {8, 20, 0.191190060725, 0.639457412693},
        {3, 7, 0.0989882784425, 0.81594843236},
        {1, 1000000, 2.53178076638e-08, 5.57163065517e-06},
    };
    for (const Row& r : rows) {
        ConfidenceInterval ci = clopper_pearson(r.x, r.n, 0.95);
        INFO("x=" << r.x << " n=" << r.n);
        CHECK(ci.low == Catch::Approx(r.low).margin(1e-8));
        CHECK(ci.high == Catch::Approx(r.high).margin(1e-8));
    }
}

TEST_CASE("single trial closed form") {
    ConfidenceInterval ci = clopper_pearson(0, 1, 0.95);
    CHECK(ci.low == 0.0);
    CHECK(ci.high == Catch::Approx(0.975).margin(1e-9));
}

TEST_CASE("interval brackets the point estimate") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 200; ++round) {
        int64_t n = 1 + static_cast<int64_t>(rng() % 5000);
        int64_t x = static_cast<int64_t>(rng() % static_cast<uint64_t>(n + 1));
        ConfidenceInterval ci = clopper_pearson(x, n, 0.95);
        double p_hat = static_cast<double>(x) / static_cast<double>(n);
        CHECK(ci.low >= 0.0);
        CHECK(ci.high <= 1.0);
        CHECK(ci.low <= p_hat + 1e-12);
        CHECK(ci.high >= p_hat - 1e-12);
        if (x == 0) CHECK(ci.low == 0.0);
        if (x == n) CHECK(ci.high == 1.0);
    }
}

TEST_CASE("a wider level nests the narrower one") {
    std::mt19937_64 rng(6);
    for (int round = 0; round < 50; ++round) {
        int64_t n = 1 + static_cast<int64_t>(rng() % 2000);
        int64_t x = static_cast<int64_t>(rng() % static_cast<uint64_t>(n + 1));
        ConfidenceInterval narrow = clopper_pearson(x, n, 0.95);
        ConfidenceInterval wide = clopper_pearson(x, n, 0.99);
        CHECK(wide.low <= narrow.low + 1e-12);
        CHECK(wide.high >= narrow.high - 1e-12);
    }
}

TEST_CASE("coverage in a seeded simulation") {
    std::mt19937_64 rng(97);
    const double p = 0.1;
    const int n = 100;
    int covered = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        int64_t x = 0;
        for (int i = 0; i < n; ++i)
            if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) ++x;
        ConfidenceInterval ci = clopper_pearson(x, n, 0.95);
        if (ci.low <= p && p <= ci.high) ++covered;
    }
    CHECK(covered >= 930);
}

TEST_CASE("domain violations are rejected") {
    CHECK_THROWS_AS(clopper_pearson(2, 1, 0.95), DomainError);
    CHECK_THROWS_AS(clopper_pearson(0, 0, 0.95), DomainError);
    CHECK_THROWS_AS(clopper_pearson(-1, 5, 0.95), DomainError);
    CHECK_THROWS_AS(clopper_pearson(1, 5, 1.5), DomainError);
}
