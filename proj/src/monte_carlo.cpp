// SPDX-License-Identifier: Apache-2.0
#include "liqgame/monte_carlo.hpp"

#include "liqgame/error.hpp"
#include "liqgame/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace liqgame {

MonteCarloResult monte_carlo_revenues(const std::vector<Strategy>& profile, const ValidatedProblem& problem,
                                      std::size_t agent, const MonteCarloConfig& config) {
    if (config.paths < 100) throw Error(ErrorCode::InvalidParam, "paths", "at least 100 paths are required");
    if (config.time_steps < 1) throw Error(ErrorCode::InvalidParam, "time_steps", "must be positive");
    if (agent >= profile.size()) throw Error(ErrorCode::InvalidParam, "agent", "agent index out of range");

    MonteCarloResult out;
    out.analytic = mean_variance(profile, problem, agent);
    const Strategy& own = profile[agent];

    if (problem.horizon.is_finite()) {
        out.horizon = problem.horizon.length();
    } else {
        const auto& e = std::get<ExpSumStrategy>(own);
        const double slowest = e.slowest_rate();
        out.horizon = std::isfinite(slowest) ? 40.0 / std::abs(slowest) : 1.0;
        // int_{Tt}^inf X^2 = int_0^inf - int_0^Tt
        const double total = integrate_product(e.terms(), e.terms(), std::numeric_limits<double>::infinity());
        const double head = integrate_product(e.terms(), e.terms(), out.horizon);
        out.tail_bound = problem.market.sigma * std::sqrt(std::max(0.0, total - head));
    }

    const std::size_t steps = config.time_steps;
    const double dt = out.horizon / static_cast<double>(steps);
    std::vector<double> x_mid(steps);
    for (std::size_t k = 0; k < steps; ++k) x_mid[k] = eval_strategy(own, (k + 0.5) * dt).position;

    const double sigma = problem.market.sigma;
    const double sqdt = std::sqrt(dt);
    const double base = out.analytic.expected_revenue;
    std::vector<double> noise_sum(config.paths);
    auto simulate = [&](std::size_t p) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        double noise = 0.0;
        for (std::size_t k = 0; k < steps; ++k) noise += x_mid[k] * normal(rng) * sqdt;
        noise_sum[p] = noise;
    };
    std::size_t workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    workers = std::min(workers, config.paths);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t p = w; p < config.paths; p += workers) simulate(p);
        });
    }
    for (auto& t : pool) t.join();

    // Sequential reductions keep the result independent of scheduling.
    const double alpha = problem.agents[agent].alpha;
    const auto P = static_cast<double>(config.paths);
    // The deterministic part is added outside the averages so sigma = 0
    // reproduces it exactly.
    double noise_mean = 0.0;
    for (double z : noise_sum) noise_mean += z;
    noise_mean /= P;
    const double mean = base + sigma * noise_mean;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double z : noise_sum) {
        const double d = sigma * (z - noise_mean);
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = m2 / (P - 1.0);
    m4 /= P;
    std::vector<double> utility(config.paths);
    for (std::size_t p = 0; p < config.paths; ++p) {
        const double r = base + sigma * noise_sum[p];
        utility[p] = alpha == 0.0 ? r : -std::expm1(-alpha * r) / alpha;
    }
    double cara = 0.0;
    for (double u : utility) cara += u;
    cara /= P;
    double cara_var = 0.0;
    for (double u : utility) cara_var += (u - cara) * (u - cara);
    cara_var /= P - 1.0;

    out.mean = mean;
    out.variance = var;
    out.cara_mean = cara;
    out.mean_se = std::sqrt(var / P);
    const double m2p = m2 / P;
    out.variance_se = std::sqrt(std::max(0.0, m4 - m2p * m2p) / P);
    out.cara_se = std::sqrt(cara_var / P);
    return out;
}

}  // namespace liqgame
