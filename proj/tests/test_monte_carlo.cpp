// SPDX-License-Identifier: Apache-2.0
#include "liqgame/closed_form.hpp"
#include "liqgame/error.hpp"
#include "liqgame/monte_carlo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace liqgame;

namespace {

ValidatedProblem fig1(double sigma = 1.0) {
    MarketParams m;
    m.lambda = 1.0;
    m.gamma = 1.0;
    m.sigma = sigma;
    m.s0 = 5.0;
    return validate_problem(m, {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2.0));
}

std::vector<Strategy> profile(const ValidatedProblem& p) {
    const auto xs = closed_form::equal_alpha_finite(p.market, p.agents, p.horizon.length());
    return {xs.begin(), xs.end()};
}

}  // namespace

TEST(MonteCarlo, ZeroVolatilityIsExact) {
    const auto p = fig1(0.0);
    // sigma = 0 disables the closed form; reuse the sigma = 1 strategies.
    const auto prof = profile(fig1(1.0));
    MonteCarloConfig cfg;
    cfg.paths = 200;
    const auto r = monte_carlo_revenues(prof, p, 0, cfg);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_EQ(r.mean, r.analytic.expected_revenue);
}

TEST(MonteCarlo, WithinThreeStandardErrors) {
    const auto p = fig1();
    MonteCarloConfig cfg;
    cfg.seed = 12345;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto r = monte_carlo_revenues(profile(p), p, i, cfg);
        EXPECT_LE(std::abs(r.mean - r.analytic.expected_revenue), 3.0 * r.mean_se);
        EXPECT_LE(std::abs(r.variance - r.analytic.variance), 3.0 * r.variance_se);
        ASSERT_TRUE(r.analytic.cara_value.has_value());
        EXPECT_LE(std::abs(r.cara_mean - *r.analytic.cara_value), 3.0 * r.cara_se);
    }
}

TEST(MonteCarlo, ReproducibleAcrossThreadCounts) {
    const auto p = fig1();
    MonteCarloConfig a;
    a.paths = 2000;
    a.seed = 9;
    a.threads = 1;
    MonteCarloConfig b = a;
    b.threads = 4;
    const auto ra = monte_carlo_revenues(profile(p), p, 1, a);
    const auto rb = monte_carlo_revenues(profile(p), p, 1, b);
    EXPECT_EQ(ra.mean, rb.mean);
    EXPECT_EQ(ra.variance, rb.variance);
    EXPECT_EQ(ra.cara_mean, rb.cara_mean);
    b.seed = 10;
    EXPECT_NE(monte_carlo_revenues(profile(p), p, 1, b).mean, ra.mean);
}

TEST(MonteCarlo, InfiniteHorizonTruncation) {
    MarketParams m;
    m.lambda = 0.16;
    m.gamma = 0.16;
    m.sigma = 1.0;
    const auto p = validate_problem(m, {{0.0, 0.33}, {1.0, 0.33}}, Horizon::infinite());
    const auto xs = closed_form::equal_alpha_infinite(m, p.agents);
    const std::vector<Strategy> prof(xs.begin(), xs.end());
    MonteCarloConfig cfg;
    cfg.seed = 4;
    const auto r = monte_carlo_revenues(prof, p, 1, cfg);
    EXPECT_GT(r.horizon, 0.0);
    EXPECT_LT(r.tail_bound, 1e-6);
    EXPECT_LE(std::abs(r.mean - r.analytic.expected_revenue), 3.0 * r.mean_se + r.tail_bound);
}

TEST(MonteCarlo, RejectsTooFewPaths) {
    const auto p = fig1();
    MonteCarloConfig cfg;
    cfg.paths = 10;
    EXPECT_THROW(monte_carlo_revenues(profile(p), p, 0, cfg), Error);
}
