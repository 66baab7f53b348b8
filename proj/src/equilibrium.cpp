// SPDX-License-Identifier: Apache-2.0
#include "liqgame/equilibrium.hpp"

#include "liqgame/closed_form.hpp"

namespace liqgame {

bool closed_form_applies(const ValidatedProblem& problem) {
    return problem.market.drift.is_identically_zero() && problem.equal_alpha() &&
           problem.common_alpha() * problem.market.sigma * problem.market.sigma > 0.0;
}

Equilibrium solve_equilibrium(const ValidatedProblem& problem, const EquilibriumOptions& options) {
    Equilibrium out;
    if (!problem.horizon.is_finite()) {
        if (problem.equal_alpha()) {
            for (auto& s : closed_form::equal_alpha_infinite(problem.market, problem.agents)) {
                out.strategies.emplace_back(std::move(s));
            }
            out.method = "closed_form.equal_alpha_infinite";
        } else {
            auto r = closed_form::two_player_infinite(problem.market, problem.agents[0], problem.agents[1]);
            out.strategies.emplace_back(std::move(r.x1));
            out.strategies.emplace_back(std::move(r.x2));
            out.method = "closed_form.two_player_infinite";
        }
        return out;
    }
    const double T = problem.horizon.length();
    if (closed_form_applies(problem)) {
        for (auto& s : closed_form::equal_alpha_finite(problem.market, problem.agents, T)) {
            out.strategies.emplace_back(std::move(s));
        }
        out.method = "closed_form.equal_alpha_finite";
        return out;
    }
    const auto system = bvp::assemble(problem);
    auto solution = bvp::solve_finite(system, problem.initial_positions(), T, options.grid, options.bvp);
    for (const auto& s : solution.strategies) out.strategies.emplace_back(s);
    out.method = "bvp.solve_finite." + solution.method;
    out.bvp_solution = std::move(solution);
    return out;
}

}  // namespace liqgame
