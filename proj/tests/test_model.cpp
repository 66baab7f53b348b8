// SPDX-License-Identifier: Apache-2.0
#include "liqgame/error.hpp"
#include "liqgame/model.hpp"
#include "liqgame/polynomial.hpp"
#include "liqgame/problem_io.hpp"
#include "liqgame/strategy.hpp"
#include "liqgame/system.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace liqgame;

namespace {

MarketParams market(double lambda, double gamma, double sigma) {
    MarketParams m;
    m.lambda = lambda;
    m.gamma = gamma;
    m.sigma = sigma;
    return m;
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no liqgame::Error thrown";
    return ErrorCode::ConfigError;
}

}  // namespace

TEST(Validate, AcceptsFigureThreeParameters) {
    const auto p = validate_problem(market(1, 1, 1), {{1.12, 0.8}, {2.06, 0.8}}, Horizon::finite(2));
    EXPECT_EQ(p.n(), 2u);
    EXPECT_TRUE(p.equal_alpha());
    EXPECT_DOUBLE_EQ(p.common_alpha(), 0.8);
}

TEST(Validate, RejectsNonPositiveLambda) {
    try {
        validate_problem(market(0, 1, 1), {{1, 1}}, Horizon::finite(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidParam);
        EXPECT_EQ(e.field(), "lambda");
    }
}

TEST(Validate, RejectsBadFields) {
    EXPECT_EQ(code_of([] { validate_problem(market(1, -1, 1), {{1, 1}}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, -1), {{1, 1}}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, 1), {}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, 1), {{1, -0.1}}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, 1), {{NAN, 1}}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { Horizon::finite(0.0); }), ErrorCode::InvalidParam);
}

TEST(Validate, InfiniteHorizonRestrictions) {
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, 0), {{1, 1}}, Horizon::infinite()); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, 1), {{1, 0}}, Horizon::infinite()); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { validate_problem(market(1, 1, 1), {{1, 1}, {1, 2}, {1, 3}}, Horizon::infinite()); }),
              ErrorCode::UnsupportedCase);
    auto m = market(1, 1, 1);
    m.drift = DriftSpec::constant(0.5);
    EXPECT_EQ(code_of([&] { validate_problem(m, {{1, 1}}, Horizon::infinite()); }), ErrorCode::UnsupportedCase);
    EXPECT_NO_THROW(validate_problem(market(1, 1, 1), {{1, 1}, {1, 2}}, Horizon::infinite()));
}

TEST(Validate, SampledDriftMustCoverHorizon) {
    auto m = market(1, 1, 1);
    m.drift = DriftSpec::sampled({0.0, 1.0}, {1.0, 2.0});
    EXPECT_EQ(code_of([&] { validate_problem(m, {{1, 1}}, Horizon::finite(2)); }), ErrorCode::InvalidParam);
    m.drift = DriftSpec::sampled({0.0, 1.0, 0.5}, {1.0, 2.0, 3.0});
    EXPECT_EQ(code_of([&] { validate_problem(m, {{1, 1}}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
}

TEST(Drift, SampledInterpolatesLinearly) {
    const auto d = DriftSpec::sampled({0.0, 1.0, 3.0}, {0.0, 2.0, -2.0});
    EXPECT_DOUBLE_EQ(d(0.5), 1.0);
    EXPECT_DOUBLE_EQ(d(2.0), 0.0);
    EXPECT_DOUBLE_EQ(d(5.0), -2.0);
    EXPECT_FALSE(d.is_identically_zero());
    EXPECT_TRUE(DriftSpec::constant(0.0).is_identically_zero());
}

TEST(ProblemIo, RoundTrip) {
    const auto doc = nlohmann::json::parse(R"({
        "market": {"lambda": 0.5, "gamma": 0.2, "sigma": 1.5, "s0": 10,
                   "drift": {"type": "sampled", "grid": [0, 1, 2], "values": [0.1, 0.3, 0.2]}},
        "agents": [{"x0": 1, "alpha": 0.1}, {"x0": -2, "alpha": 0.4}],
        "horizon": {"type": "finite", "T": 2}})");
    const auto p = problem_from_json(doc);
    EXPECT_DOUBLE_EQ(p.market.s0, 10.0);
    EXPECT_DOUBLE_EQ(p.market.drift(0.5), 0.2);
    const auto again = problem_from_json(problem_to_json(p));
    EXPECT_EQ(problem_to_json(again), problem_to_json(p));
}

TEST(ProblemIo, MalformedIsConfigError) {
    EXPECT_EQ(code_of([] { problem_from_json(nlohmann::json::parse(R"({"agents": []})")); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] {
                  problem_from_json(nlohmann::json::parse(
                      R"({"market": {"lambda": "x", "gamma": 0, "sigma": 1}, "agents": [{"x0": 1, "alpha": 1}],
                          "horizon": {"type": "finite", "T": 1}})"));
              }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] {
                  problem_from_json(nlohmann::json::parse(
                      R"({"market": {"lambda": 1, "gamma": 0, "sigma": 1}, "agents": [{"x0": 1, "alpha": 1}],
                          "horizon": {"type": "weekly"}})"));
              }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { load_problem("/nonexistent/liqgame.json"); }), ErrorCode::ConfigError);
}

TEST(ProblemIo, SemanticErrorsPropagate) {
    EXPECT_EQ(code_of([] {
                  problem_from_json(nlohmann::json::parse(
                      R"({"market": {"lambda": 0, "gamma": 0, "sigma": 1}, "agents": [{"x0": 1, "alpha": 1}],
                          "horizon": {"type": "finite", "T": 1}})"));
              }),
              ErrorCode::InvalidParam);
}

TEST(Strategy, ExpSumEvaluation) {
    // x e^{-t} - x e^{-T} e^{0 t} vanishes at T
    const double T = 2.0;
    const ExpSumStrategy s({{1.5, -1.0, 0.0, 0}, {-1.5 * std::exp(-T), 0.0, 0.0, 0}}, Horizon::finite(T));
    EXPECT_NEAR(s.position(0.0), 1.5 * (1.0 - std::exp(-T)), 1e-15);
    EXPECT_NEAR(s.position(T), 0.0, 1e-15);
    EXPECT_NEAR(s.rate(1.0), -1.5 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(s.acceleration(1.0), 1.5 * std::exp(-1.0), 1e-15);
    EXPECT_THROW((void)s.position(2.5), Error);
    EXPECT_THROW((void)s.position(-0.1), Error);
}

TEST(Strategy, RejectsNonLiquidatingOrGrowing) {
    EXPECT_EQ(code_of([] { ExpSumStrategy({{1.0, -1.0, 0.0, 0}}, Horizon::finite(1)); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { ExpSumStrategy({{1.0, 0.5, 0.0, 0}}, Horizon::infinite()); }), ErrorCode::InvalidParam);
}

TEST(Strategy, PowerOneTerms) {
    // (1 - t/T) as 1 - t/T with power-1 term
    const double T = 4.0;
    const ExpSumStrategy s({{1.0, 0.0, 0.0, 0}, {-1.0 / T, 0.0, 0.0, 1}}, Horizon::finite(T));
    EXPECT_NEAR(s.position(1.0), 0.75, 1e-15);
    EXPECT_NEAR(s.rate(3.0), -0.25, 1e-15);
    EXPECT_NEAR(s.acceleration(3.0), 0.0, 1e-15);
}

TEST(Strategy, GridSnapsAndInterpolates) {
    std::vector<double> x{1.0, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25, 0.125, 1e-9};
    const auto g = GridStrategy::liquidating(1.0, x);
    EXPECT_EQ(g.positions().back(), 0.0);
    EXPECT_NEAR(g.position(0.0625), 0.9375, 1e-15);
    EXPECT_NEAR(g.rate(0.5), -1.0, 1e-12);
    EXPECT_EQ(code_of([] { GridStrategy::liquidating(1.0, {1.0, 0.0}); }), ErrorCode::InvalidParam);
    EXPECT_THROW((void)g.position(1.5), Error);
}

TEST(Strategy, SampleOnGridUsesExactRates) {
    const ExpSumStrategy s({{2.0, -0.5, 0.0, 0}}, Horizon::infinite());
    const auto g = sample_on_grid(s, 4.0, 16);
    EXPECT_FALSE(g.liquidates());
    EXPECT_TRUE(g.has_explicit_rates());
    EXPECT_NEAR(g.node_rates()[16], -std::exp(-2.0), 1e-15);
    EXPECT_NEAR(eval_strategy(Strategy{g}, 4.0).position, 2.0 * std::exp(-2.0), 1e-15);
}

TEST(Polynomial, RootsOfKnownCubic) {
    // (x + 1)(x + 2)(x - 3) = x^3 - 7x - 6
    const std::vector<double> a{-6.0, -7.0, 0.0, 1.0};
    const auto neg = negative_real_roots(a);
    ASSERT_EQ(neg.size(), 2u);
    EXPECT_NEAR(neg[0], -2.0, 1e-13);
    EXPECT_NEAR(neg[1], -1.0, 1e-13);
    EXPECT_EQ(polynomial_roots(a).size(), 3u);
    EXPECT_THROW(polynomial_roots(std::vector<double>{1.0, 0.0}), Error);
}

TEST(Polynomial, ComplexRootsAreNotReal) {
    // x^2 + 1
    EXPECT_TRUE(negative_real_roots(std::vector<double>{1.0, 0.0, 1.0}).empty());
}

TEST(System, InverseAndFactorization) {
    const auto m = market(0.7, 0.3, 1.2);
    const std::vector<double> alphas{0.5, 1.0, 2.0};
    const auto B = system_B(m, 3);
    const auto Binv = system_B_inverse(m, 3);
    EXPECT_LT((B * Binv - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-14);
    const auto M = system_matrix(m, alphas);
    EXPECT_LT((B * M - system_C(m, alphas)).cwiseAbs().maxCoeff(), 1e-13);
    const auto f = forcing_direction(m, 3);
    EXPECT_NEAR((B * f).head(3).sum(), -3.0, 1e-14);
}

TEST(System, EqualAlphaMatchesGeneral) {
    const auto m = market(1.3, 0.4, 0.9);
    const std::vector<double> alphas(4, 0.6);
    EXPECT_LT((system_matrix(m, alphas) - system_matrix_equal(m, 0.6, 4)).cwiseAbs().maxCoeff(), 1e-15);
}
