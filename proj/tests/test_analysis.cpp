// SPDX-License-Identifier: Apache-2.0
#include "liqgame/analysis.hpp"
#include "liqgame/closed_form.hpp"
#include "liqgame/error.hpp"
#include "liqgame/integrals.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace liqgame;

namespace {

MarketParams market(double lambda, double gamma, double sigma, double s0 = 0.0) {
    MarketParams m;
    m.lambda = lambda;
    m.gamma = gamma;
    m.sigma = sigma;
    m.s0 = s0;
    return m;
}

ExpSumStrategy linear(double x, double T) {
    return ExpSumStrategy({{x, 0.0, 0.0, 0}, {-x / T, 0.0, 0.0, 1}}, Horizon::finite(T));
}

std::vector<Strategy> as_profile(const std::vector<ExpSumStrategy>& xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST(Integrals, ExpMomentAgainstQuadrature) {
    for (int m = 0; m <= 2; ++m) {
        for (double s : {-3.0, -1e-9, 0.0, 1e-9, 0.7}) {
            const double ref = gauss_legendre([&](double t) { return std::pow(t, m) * std::exp(s * t + 0.2); }, 0.0, 1.7);
            EXPECT_NEAR(exp_moment(m, s, 0.2, 1.7), ref, 1e-13 * std::max(1.0, std::abs(ref)));
        }
    }
    EXPECT_NEAR(exp_moment(2, -2.0, 0.0, std::numeric_limits<double>::infinity()), 2.0 / 8.0, 1e-15);
}

TEST(Integrals, SimpsonExactForCubics) {
    auto f = [](double t) { return 1.0 + t - 2.0 * t * t + 0.5 * t * t * t; };
    for (std::size_t N : {8u, 9u}) {
        std::vector<double> v(N + 1);
        for (std::size_t k = 0; k <= N; ++k) v[k] = f(2.0 * static_cast<double>(k) / static_cast<double>(N));
        EXPECT_NEAR(simpson(v, 2.0 / static_cast<double>(N)), 2.0 + 2.0 - 16.0 / 3.0 + 2.0, 1e-13);
    }
}

TEST(MeanVariance, LinearLiquidationRiskNeutral) {
    const double x = 1.7, T = 2.5;
    const auto p = validate_problem(market(0.8, 0.6, 1.0, 10.0), {{x, 0.0}}, Horizon::finite(T));
    const auto r = mean_variance(std::vector<Strategy>{linear(x, T)}, p, 0);
    EXPECT_NEAR(r.expected_revenue, x * 10.0 - 0.3 * x * x - 0.8 * x * x / T, 1e-12);
    ASSERT_TRUE(r.cara_value.has_value());
    EXPECT_DOUBLE_EQ(*r.cara_value, r.expected_revenue);
    EXPECT_NEAR(r.variance, x * x * T / 3.0, 1e-12);

    const auto g = sample_on_grid(linear(x, T), T, 40);
    const auto rg = mean_variance(std::vector<Strategy>{g}, p, 0);
    EXPECT_NEAR(rg.expected_revenue, r.expected_revenue, 1e-12);
    EXPECT_NEAR(rg.variance, r.variance, 1e-12);
}

TEST(MeanVariance, ZeroProfileIsZero) {
    const auto p = validate_problem(market(1, 1, 1), {{0, 1}, {0, 1}}, Horizon::finite(1.0));
    const auto xs = closed_form::equal_alpha_finite(p.market, p.agents, 1.0);
    const auto r = mean_variance(as_profile(xs), p, 1);
    EXPECT_EQ(r.expected_revenue, 0.0);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_EQ(r.mean_variance_value, 0.0);
}

TEST(MeanVariance, VarianceScalesWithSigmaSquared) {
    const auto xs = closed_form::equal_alpha_finite(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, 2.0);
    const auto p1 = validate_problem(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2.0));
    const auto p3 = validate_problem(market(1, 1, 3), {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2.0));
    const auto v1 = mean_variance(as_profile(xs), p1, 0).variance;
    const auto v3 = mean_variance(as_profile(xs), p3, 0).variance;
    EXPECT_GT(v1, 0.0);
    EXPECT_NEAR(v3, 9.0 * v1, 1e-13 * v3);
}

TEST(MeanVariance, ExactAndGridAgree) {
    auto m = market(0.7, 0.4, 1.1, 3.0);
    m.drift = DriftSpec::sampled({0.0, 0.8, 2.0}, {0.1, -0.2, 0.3});
    const auto p = validate_problem(m, {{1.3, 0.5}, {-0.6, 0.5}}, Horizon::finite(2.0));
    const auto xs = closed_form::equal_alpha_finite(market(0.7, 0.4, 1.1), p.agents, 2.0);
    std::vector<Strategy> grids;
    for (const auto& x : xs) grids.emplace_back(sample_on_grid(x, 2.0, 800));
    for (std::size_t i = 0; i < 2; ++i) {
        const auto a = mean_variance(as_profile(xs), p, i);
        const auto b = mean_variance(grids, p, i);
        EXPECT_NEAR(a.expected_revenue, b.expected_revenue, 1e-5);
        EXPECT_NEAR(a.variance, b.variance, 1e-9);
    }
}

TEST(MeanVariance, Mismatches) {
    const auto p = validate_problem(market(1, 1, 1), {{1, 1}, {1, 1}}, Horizon::finite(2.0));
    const std::vector<Strategy> wrong_h{linear(1.0, 1.0), linear(1.0, 2.0)};
    try {
        (void)mean_variance(wrong_h, p, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HorizonMismatch);
    }
    const std::vector<Strategy> wrong_g{sample_on_grid(linear(1.0, 2.0), 2.0, 16), sample_on_grid(linear(1.0, 2.0), 2.0, 32)};
    try {
        (void)mean_variance(wrong_g, p, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(MeanVariance, CaraIdentity) {
    EXPECT_NEAR(cara_from_moments(0.5, 2.0, 0.3), 2.0 * (1.0 - std::exp(-1.0 + 0.25 * 0.15)), 1e-15);
    EXPECT_DOUBLE_EQ(cara_from_moments(0.0, 2.0, 0.3), 2.0);
}

TEST(Deviation, EquilibriumHasNoProfitableDeviation) {
    const auto p = validate_problem(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2.0));
    const auto xs = closed_form::equal_alpha_finite(p.market, p.agents, 2.0);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto r = deviation_test(xs, p, i);
        EXPECT_EQ(r.directions, 200u);
        EXPECT_TRUE(r.passed()) << r.improving << " " << r.max_first_order << " " << r.max_second_order;
    }
}

TEST(Deviation, DetectsNonEquilibrium) {
    const auto p = validate_problem(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2.0));
    const std::vector<ExpSumStrategy> lin{linear(1.12, 2.0), linear(2.06, 2.0)};
    const auto r = deviation_test(lin, p, 0);
    EXPECT_FALSE(r.passed());
    EXPECT_GT(r.improving, 0u);
}

TEST(Deviation, InfiniteHorizon) {
    const auto p = validate_problem(market(0.16, 0.16, 1.0), {{0.0, 0.33}, {1.0, 0.33}}, Horizon::infinite());
    const auto xs = closed_form::equal_alpha_infinite(p.market, p.agents);
    EXPECT_TRUE(deviation_test(xs, p, 0).passed());
    EXPECT_TRUE(deviation_test(xs, p, 1).passed());
}

TEST(Classify, FigureSixAndThreshold) {
    EXPECT_EQ(classify_role(0.33, 0.16, 0.16).role, Role::LiquidityProvision);
    EXPECT_NEAR(classify_role(0.33, 0.16, 0.16).margin, 0.0528 - 0.0512, 1e-15);
    EXPECT_EQ(classify_role(0.33, 0.15, 0.16).role, Role::Predatory);
    EXPECT_EQ(classify_role(2.0, 1.0, 1.0).role, Role::Inactive);
    EXPECT_EQ(classify_role(1.0, 1.0, 0.0).role, Role::LiquidityProvision);
    EXPECT_EQ(to_string(Role::Predatory), "Predatory");
}

TEST(Classify, AgreesWithSignOfInfiniteStrategy) {
    const double a = 0.33;
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
        for (int j = 0; j < 30; ++j) {
            const double lambda = 0.02 + 0.05 * i;
            const double gamma = 0.01 + 0.02 * j;
            const auto c = classify_role(a, lambda, gamma);
            if (c.role == Role::Inactive) continue;
            const auto xs = closed_form::equal_alpha_infinite(market(lambda, gamma, 1.0), {{0.0, a}, {1.0, a}, {0.5, a}});
            const double x = xs[0].position(1.0);
            EXPECT_EQ(x > 0.0, c.role == Role::LiquidityProvision) << lambda << " " << gamma;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 900);
}

TEST(LiquidationTime, SingleModeClosedForm) {
    const ExpSumStrategy s({{2.0, -0.7, 0.0, 0}}, Horizon::infinite());
    EXPECT_NEAR(effective_liquidation_time(s, 0.99), std::log(100.0) / 0.7, 1e-12);
    EXPECT_THROW((void)effective_liquidation_time(s, 1.5), Error);
    EXPECT_THROW((void)effective_liquidation_time(ExpSumStrategy::zero(Horizon::infinite()), 0.5), Error);
}

TEST(LiquidationTime, TwoModesByBisection) {
    // 0.5 e^{-t} + 0.5 e^{-3t} crosses 0.1
    const ExpSumStrategy s({{0.5, -1.0, 0.0, 0}, {0.5, -3.0, 0.0, 0}}, Horizon::infinite());
    const double t = effective_liquidation_time(s, 0.9);
    EXPECT_NEAR(0.5 * std::exp(-t) + 0.5 * std::exp(-3.0 * t), 0.1, 1e-12);
}

TEST(LiquidationTime, FiniteAndGrid) {
    const auto xs = closed_form::equal_alpha_finite(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, 2.0);
    EXPECT_LE(effective_liquidation_time(xs[0], 0.99), 2.0);
    const auto g = sample_on_grid(linear(1.0, 2.0), 2.0, 20);
    EXPECT_NEAR(effective_liquidation_time(g, 0.5), 1.0, 1e-12);
    const auto trunc = sample_on_grid(ExpSumStrategy({{1.0, -0.1, 0.0, 0}}, Horizon::infinite()), 2.0, 20);
    try {
        (void)effective_liquidation_time(trunc, 0.99);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NeverReached);
    }
}

TEST(Scan, ParameterNames) {
    for (const char* name : {"alpha_sigma2", "lambda", "gamma", "n", "T"}) {
        EXPECT_EQ(to_string(parse_scan_parameter(name)), name);
    }
    EXPECT_THROW((void)parse_scan_parameter("beta"), Error);
}

TEST(Scan, WithParameterSplitsInventory) {
    const auto p = validate_problem(market(2, 0.1, 1), {{5.0, 0.33}, {5.0, 0.33}}, Horizon::infinite());
    const auto q = with_parameter(p, ScanParameter::N, 5);
    ASSERT_EQ(q.n(), 5u);
    EXPECT_DOUBLE_EQ(q.agents[0].x0, 5.0);
    EXPECT_DOUBLE_EQ(q.agents[3].x0, 1.25);
    const auto r = with_parameter(p, ScanParameter::AlphaSigma2, 0.66);
    EXPECT_NEAR(r.agents[1].alpha * r.market.sigma * r.market.sigma, 0.66, 1e-15);
}

TEST(Scan, OrderedCompleteAndRecordsFailures) {
    const auto p = validate_problem(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2.0));
    const std::vector<double> grid{0.5, 1.0, -1.0, 2.0};
    const auto pts = parameter_scan(p, ScanParameter::Lambda, grid, Probe{0, 1.0, std::nullopt});
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(pts[k].value, grid[k]);
    EXPECT_EQ(pts[2].status, "InvalidParam");
    EXPECT_FALSE(pts[2].probe.has_value());
    EXPECT_EQ(pts[1].status, "ok");
    EXPECT_NEAR(*pts[1].probe, 0.3383551001941446, 1e-14);
    EXPECT_EQ(parameter_scan(p, ScanParameter::T, {3.0}, Probe{}).size(), 1u);
}

TEST(Scan, FigureOneIsNonMonotone) {
    const auto p = validate_problem(market(1, 1, 1), {{1.12, 0.0}, {2.06, 0.0}}, Horizon::finite(2.0));
    const auto pts = parameter_scan(p, ScanParameter::AlphaSigma2, linspace(0, 3, 61), Probe{0, 1.0, std::nullopt});
    std::vector<double> v;
    for (const auto& q : pts) v.push_back(*q.probe);
    EXPECT_TRUE(is_non_monotone(v));
}

TEST(Monotone, Helpers) {
    EXPECT_FALSE(is_non_monotone({1.0, 2.0, 3.0}));
    EXPECT_TRUE(is_non_monotone({1.0, 2.0, 1.5}));
    EXPECT_FALSE(is_non_monotone({1.0, 1.0 + 1e-12, 1.0}));
    EXPECT_EQ(monotonicity_violations({3.0, 2.0, 2.5, 1.0}, true), 1u);
    EXPECT_EQ(linspace(0, 1, 5)[4], 1.0);
}
