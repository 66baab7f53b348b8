// SPDX-License-Identifier: Apache-2.0
//
// Simulated revenues of a deterministic strategy profile. The deterministic
// part of the revenue is exact; the Brownian part sigma int X dW is summed
// over time steps with the position taken at interval midpoints.
#pragma once

#include "liqgame/analysis.hpp"

#include <cstdint>

namespace liqgame {

struct MonteCarloConfig {
    std::size_t paths = 10000;
    std::size_t time_steps = 400;
    std::uint64_t seed = 1;
    /// 0 means one worker per hardware thread.
    std::size_t threads = 0;
};

struct MonteCarloResult {
    double mean = 0.0;
    double variance = 0.0;
    double cara_mean = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
    double cara_se = 0.0;
    /// Simulated horizon; 40 / |slowest rate| on an infinite horizon.
    double horizon = 0.0;
    /// Standard deviation of the truncated tail sigma (int_{T_trunc}^inf X^2)^{1/2}.
    double tail_bound = 0.0;
    EvaluationResult analytic;
};

/// Path p draws its increments from a generator seeded by (seed, p), so every
/// path is independent of the number of workers.
MonteCarloResult monte_carlo_revenues(const std::vector<Strategy>& profile, const ValidatedProblem& problem,
                                      std::size_t agent, const MonteCarloConfig& config);

}  // namespace liqgame
