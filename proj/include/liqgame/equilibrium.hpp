// SPDX-License-Identifier: Apache-2.0
//
// Dispatch to the closed form when one applies, otherwise to the bvp solver.
#pragma once

#include "liqgame/bvp.hpp"
#include "liqgame/model.hpp"
#include "liqgame/strategy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace liqgame {

struct EquilibriumOptions {
    std::size_t grid = 400;
    bvp::BvpOptions bvp;
};

struct Equilibrium {
    std::vector<Strategy> strategies;
    /// Which path produced the strategies, e.g. "closed_form.equal_alpha_finite".
    std::string method;
    std::optional<bvp::BvpSolution> bvp_solution;
};

/// Finite horizon: closed form when b = 0, all alphas equal and alpha sigma^2 > 0;
/// bvp otherwise. Infinite horizon: case (a) or (b) closed form.
Equilibrium solve_equilibrium(const ValidatedProblem& problem, const EquilibriumOptions& options = {});

/// True when the finite-horizon closed form covers the problem.
bool closed_form_applies(const ValidatedProblem& problem);

}  // namespace liqgame
