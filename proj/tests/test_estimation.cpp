#include "sdfsim/error.hpp"
#include "sdfsim/estimation.hpp"
#include "sdfsim/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sdfsim;

namespace {

// Tally whose black ratio is exactly `ratio` over `total` observations.
ObservationTally tally_for(double ratio, std::uint64_t total = 1000)
{
    return {static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(total))), total};
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

// Expected Fisher information of a binomial tally in f, by summing the central
// second difference of the log pmf over every outcome.
double fisher_information_oracle(std::uint64_t t, double f, double b_hat, double w_hat)
{
    auto log_pmf = [&](std::uint64_t k, double fill) {
        const double p = b_hat * fill + (1.0 - w_hat) * (1.0 - fill);
        const double n = static_cast<double>(t);
        const double kk = static_cast<double>(k);
        return std::lgamma(n + 1) - std::lgamma(kk + 1) - std::lgamma(n - kk + 1) + kk * std::log(p) +
               (n - kk) * std::log1p(-p);
    };
    const double h = 1e-4;
    double info = 0.0;
    for (std::uint64_t k = 0; k <= t; ++k)
    {
        const double second = (log_pmf(k, f + h) - 2.0 * log_pmf(k, f) + log_pmf(k, f - h)) / (h * h);
        info -= std::exp(log_pmf(k, f)) * second;
    }
    return info;
}

} // namespace

TEST_CASE("observe follows the sensor model")
{
    for (double draw : {0.0, 0.3, 0.999999})
    {
        CHECK(observe(TileColor::Black, 1.0, 1.0, draw) == 1);
        CHECK(observe(TileColor::White, 1.0, 1.0, draw) == 0);
    }
    CHECK(observe(TileColor::Black, 0.9, 0.9, 0.89) == 1);
    CHECK(observe(TileColor::Black, 0.9, 0.9, 0.9) == 0);
    CHECK(observe(TileColor::White, 0.9, 0.9, 0.89) == 0);
    CHECK(observe(TileColor::White, 0.9, 0.9, 0.9) == 1);
}

TEST_CASE("black observation probability matches the tabulated values")
{
    CHECK(round3(black_observation_probability(0.55, 0.55, 0.55)) == 0.505);
    CHECK(round3(black_observation_probability(0.55, 0.95, 0.95)) == 0.545);
    CHECK(round3(black_observation_probability(0.95, 0.55, 0.55)) == 0.545);
    CHECK(round3(black_observation_probability(0.95, 0.95, 0.95)) == 0.905);
}

TEST_CASE("observe empirical black rate converges")
{
    struct Case
    {
        double f, b, expected;
    };
    for (auto c : {Case{0.55, 0.55, 0.505}, Case{0.95, 0.95, 0.905}})
    {
        RandomStream rng(11);
        const int draws = 400000;
        int black = 0;
        for (int i = 0; i < draws; ++i)
        {
            const auto tile = rng.bernoulli(c.f) ? TileColor::Black : TileColor::White;
            black += observe(tile, c.b, c.b, rng.uniform());
        }
        // 5 binomial standard errors
        CHECK(std::fabs(black / static_cast<double>(draws) - c.expected) < 5 * std::sqrt(0.25 / draws));
    }
}

TEST_CASE("local_estimate reproduces tabulated estimates")
{
    struct Row
    {
        double ratio, b_hat, expected;
    };
    const Row rows[] = {
        {0.505, 0.55, 0.550}, {0.505, 0.75, 0.510}, {0.505, 0.95, 0.506},
        {0.545, 0.95, 0.550}, {0.545, 0.75, 0.590}, {0.545, 0.55, 0.950},
        {0.545, 0.55, 0.950}, {0.545, 0.75, 0.590}, {0.545, 0.95, 0.550},
        {0.905, 0.95, 0.950}, {0.905, 0.75, 1.000}, {0.905, 0.55, 1.000},
    };
    for (const auto &r : rows)
        CHECK(round3(local_estimate(tally_for(r.ratio), r.b_hat, r.b_hat)) == r.expected);

    CHECK(local_estimate(tally_for(0.905), 0.55, 0.55) == 1.0);
    CHECK(local_estimate(tally_for(0.7, 10), 1.0, 1.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(local_estimate(tally_for(0.1), 0.9, 0.9) == 0.0);
}

TEST_CASE("local_estimate errors")
{
    CHECK_THROWS_AS(local_estimate(ObservationTally{0, 0}, 0.9, 0.9), DomainError);
    CHECK_THROWS_AS(local_estimate(ObservationTally{3, 10}, 0.5, 0.5), DomainError);
}

TEST_CASE("local_estimate stays in [0, 1] and is exact on the asymptote")
{
    RandomStream rng(5);
    for (int i = 0; i < 2000; ++i)
    {
        const auto t = 1 + rng.below(5000);
        const ObservationTally tally{rng.below(t + 1), t};
        const double b_hat = rng.uniform(kMinAssumedAccuracy, kMaxAssumedAccuracy);
        const double x = local_estimate(tally, b_hat, b_hat);
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    for (double f : {0.1, 0.3, 0.55, 0.8, 0.95})
        for (double b : {0.55, 0.75, 0.95})
        {
            const double p = black_observation_probability(f, b, b);
            // Real-valued black ratio: go through a huge tally.
            const std::uint64_t t = 1ULL << 50;
            const ObservationTally tally{static_cast<std::uint64_t>(std::llround(p * static_cast<double>(t))), t};
            CHECK(local_estimate(tally, b, b) == doctest::Approx(f).epsilon(1e-12));
        }
}

TEST_CASE("local_confidence branches")
{
    // interior: 0.81 * 100^3 / (50 * 50)
    const ObservationTally half{50, 100};
    const double x_half = local_estimate(half, 0.95, 0.95);
    CHECK(local_confidence(half, 0.95, 0.95, x_half) == doctest::Approx(324.0).epsilon(1e-12));

    // saturated at one: 0.81 (10 * 0.9025 - 0.9 * 10) / (0.9025 * 0.0025)
    const ObservationTally all_black{10, 10};
    REQUIRE(local_estimate(all_black, 0.95, 0.95) == 1.0);
    CHECK(local_confidence(all_black, 0.95, 0.95, 1.0) == doctest::Approx(0.02025 / 0.00225625).epsilon(1e-12));
    CHECK(local_confidence(all_black, 0.95, 0.95, 1.0) == doctest::Approx(8.975).epsilon(1e-4));

    // saturated at zero mirrors it
    const ObservationTally all_white{0, 10};
    REQUIRE(local_estimate(all_white, 0.95, 0.95) == 0.0);
    CHECK(local_confidence(all_white, 0.95, 0.95, 0.0) == doctest::Approx(8.975).epsilon(1e-4));

    // d-ratio between the two accuracies on the interior branch
    const ObservationTally t{520, 1000};
    const double hi = local_confidence(t, 0.95, 0.95, 0.5);
    const double lo = local_confidence(t, 0.55, 0.55, 0.5);
    CHECK(hi / lo == doctest::Approx(81.0).epsilon(1e-12));
}

TEST_CASE("local_confidence equals the expected Fisher information")
{
    for (auto [n, t, b_hat] : {std::tuple{37ULL, 100ULL, 0.8}, std::tuple{22ULL, 40ULL, 0.6}, std::tuple{70ULL, 90ULL, 0.95}})
    {
        const ObservationTally tally{n, t};
        const double x = local_estimate(tally, b_hat, b_hat);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        CHECK(local_confidence(tally, b_hat, b_hat, x) ==
              doctest::Approx(fisher_information_oracle(t, x, b_hat, b_hat)).epsilon(1e-4));
    }
}

TEST_CASE("local_confidence errors")
{
    CHECK_THROWS_AS(local_confidence(ObservationTally{0, 0}, 0.9, 0.9, 0.5), DomainError);
    CHECK_THROWS_AS(local_confidence(ObservationTally{0, 10}, 0.9, 0.9, 0.5), DomainError);
    CHECK_THROWS_AS(local_confidence(ObservationTally{10, 10}, 0.9, 0.9, 0.5), DomainError);
    CHECK_THROWS_AS(local_confidence(ObservationTally{10, 10}, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("local_confidence increases with assumed accuracy on the interior branch")
{
    const ObservationTally tally{600, 1000};
    double prev = 0.0;
    for (double b_hat = 0.6; b_hat < 0.999; b_hat += 0.01)
    {
        const double x = local_estimate(tally, b_hat, b_hat);
        if (x <= 0.0 || x >= 1.0)
            break;
        const double alpha = local_confidence(tally, b_hat, b_hat, x);
        CHECK(alpha > prev);
        prev = alpha;
    }
}

TEST_CASE("social_fuse")
{
    const std::vector<WeightedEstimate> two{{0.4, 1}, {0.6, 1}};
    auto s = social_fuse(two);
    REQUIRE(s);
    CHECK(s->estimate == doctest::Approx(0.5));
    CHECK(s->confidence == 2.0);

    const std::vector<WeightedEstimate> one{{0.7, 5}};
    s = social_fuse(one);
    CHECK(s->estimate == 0.7);
    CHECK(s->confidence == 5.0);

    const std::vector<WeightedEstimate> uneven{{0.2, 1}, {0.8, 3}};
    s = social_fuse(uneven);
    CHECK(s->estimate == doctest::Approx(0.65).epsilon(1e-14));
    CHECK(s->confidence == 4.0);

    CHECK_FALSE(social_fuse({}).has_value());
    const std::vector<WeightedEstimate> zeros{{0.2, 0}, {0.8, 0}};
    CHECK_THROWS_AS(social_fuse(zeros), DomainError);
    const std::vector<WeightedEstimate> negative{{0.2, -1}, {0.8, 3}};
    CHECK_THROWS_AS(social_fuse(negative), DomainError);
}

TEST_CASE("social_fuse is permutation invariant")
{
    RandomStream rng(9);
    for (int i = 0; i < 200; ++i)
    {
        std::vector<WeightedEstimate> msgs(1 + rng.below(15));
        for (auto &m : msgs)
            m = {rng.uniform(), rng.uniform(0.0, 1000.0)};
        const auto a = *social_fuse(msgs);
        shuffle(msgs.begin(), msgs.end(), rng);
        const auto b = *social_fuse(msgs);
        CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
        CHECK(a.confidence == doctest::Approx(b.confidence).epsilon(1e-12));
    }
}

TEST_CASE("informed_fuse")
{
    CHECK(informed_fuse(0.3, 5.0, std::nullopt, 0.0) == 0.3);
    CHECK(informed_fuse(0.3, 5.0, 0.9, 0.0) == 0.3);
    CHECK(informed_fuse(0.4, 2.0, 0.6, 2.0) == doctest::Approx(0.5));
    CHECK(informed_fuse(0.9, 1.0, 0.5, 3.0) == doctest::Approx(0.6).epsilon(1e-14));

    CHECK_THROWS_AS(informed_fuse(0.4, 0.0, 0.6, 0.0), DomainError);
    CHECK_THROWS_AS(informed_fuse(0.4, 1.0, std::nullopt, 1.0), DomainError);
    CHECK_THROWS_AS(informed_fuse(0.4, -1.0, 0.6, 1.0), DomainError);
}

TEST_CASE("informed_fuse is a scale-invariant convex combination")
{
    RandomStream rng(13);
    for (int i = 0; i < 1000; ++i)
    {
        const double a = rng.uniform(), b = rng.uniform();
        const double alpha = rng.uniform(0.0, 1e4), beta = rng.uniform(1e-9, 1e4);
        const double x = informed_fuse(a, alpha, b, beta);
        CHECK(x >= std::min(a, b));
        CHECK(x <= std::max(a, b));
        const double k = rng.uniform(1e-3, 1e3);
        CHECK(informed_fuse(a, k * alpha, b, k * beta) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("estimation operations are pure")
{
    const ObservationTally tally{321, 1000};
    CHECK(local_estimate(tally, 0.7, 0.7) == local_estimate(tally, 0.7, 0.7));
    const auto v1 = local_values(tally, 0.7, 0.7);
    const auto v2 = local_values(tally, 0.7, 0.7);
    CHECK(v1 == v2);
}

TEST_CASE("SensorAccuracy validation")
{
    CHECK_NOTHROW(SensorAccuracy::symmetric(0.95, 0.55));
    CHECK_THROWS_AS(SensorAccuracy::symmetric(0.95, 0.5), DomainError);
    CHECK_THROWS_AS(SensorAccuracy::symmetric(0.95, 1.0), DomainError);
    CHECK_THROWS_AS(SensorAccuracy::symmetric(1.0, 0.9), DomainError);
    CHECK_THROWS_AS(SensorAccuracy::symmetric(0.0, 0.9), DomainError);
}
