// SPDX-License-Identifier: Apache-2.0
//
// Analytic equilibria: equal risk aversion without drift (finite and infinite
// horizon), the two-player finite case in sinh form, the mean-field limit, and
// the two-player infinite-horizon case with distinct risk aversions.
#pragma once

#include "liqgame/model.hpp"
#include "liqgame/strategy.hpp"

#include <array>
#include <utility>
#include <vector>

namespace liqgame::closed_form {

[[nodiscard]] SpectralData spectral(const MarketParams& market, double alpha, std::size_t n);

/// tau^4 - (2 gamma / 3 lambda) tau^3 - ((gamma^2 + 2 lambda sigma^2 (a1 + a2)) / 3 lambda^2) tau^2
///   + sigma^4 a1 a2 / (3 lambda^2), ascending coefficients.
[[nodiscard]] std::array<double, 5> two_player_quartic(const MarketParams& market, double alpha1, double alpha2);

/// Both negative roots of the quartic, ascending. RootFindingFailed unless
/// exactly two distinct negative roots are found.
[[nodiscard]] std::array<double, 2> two_player_quartic_roots(const MarketParams& market, double alpha1,
                                                             double alpha2);

/// Almgren's single-agent strategy; alpha = 0 (or sigma = 0) gives linear liquidation.
[[nodiscard]] ExpSumStrategy single_agent_finite(const MarketParams& market, const AgentSpec& agent, double T);

/// Requires zero drift (DriftNotZero otherwise) and alpha sigma^2 > 0.
[[nodiscard]] std::vector<ExpSumStrategy> equal_alpha_finite(const MarketParams& market,
                                                             const std::vector<AgentSpec>& agents, double T);

/// Sum of all equilibrium positions in the two-sided sinh form.
[[nodiscard]] ExpSumStrategy aggregate_finite(const MarketParams& market, double alpha, std::size_t n,
                                              double x_sum, double T);

/// Equal-alpha two-player equilibrium assembled from its sum and difference.
[[nodiscard]] std::pair<ExpSumStrategy, ExpSumStrategy> two_player_finite(const MarketParams& market,
                                                                          const AgentSpec& agent1,
                                                                          const AgentSpec& agent2, double T);

/// Limit of agent i's strategy as n grows with average inventory x_bar.
/// Throws GammaZero when gamma == 0.
[[nodiscard]] ExpSumStrategy mean_field_strategy(const MarketParams& market, double alpha, double x_i,
                                                 double x_bar, double T);

[[nodiscard]] std::vector<ExpSumStrategy> equal_alpha_infinite(const MarketParams& market,
                                                               const std::vector<AgentSpec>& agents);

/// Infinite-horizon strategy of one agent among n with average inventory x_bar.
[[nodiscard]] ExpSumStrategy equal_alpha_infinite_agent(const MarketParams& market, double alpha, std::size_t n,
                                                        double x_i, double x_bar);

struct TwoPlayerInfinite {
    ExpSumStrategy x1;
    ExpSumStrategy x2;
    std::array<double, 2> roots;
};

[[nodiscard]] TwoPlayerInfinite two_player_infinite(const MarketParams& market, const AgentSpec& agent1,
                                                    const AgentSpec& agent2);

/// For each horizon, the largest |X_i^(T)(t) - X_i^*(t)| over agents and the
/// probe times not exceeding T.
[[nodiscard]] std::vector<double> finite_to_infinite_convergence(const MarketParams& market,
                                                                 const std::vector<AgentSpec>& agents,
                                                                 const std::vector<double>& probes,
                                                                 const std::vector<double>& horizons);

}  // namespace liqgame::closed_form
