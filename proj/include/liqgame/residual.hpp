// SPDX-License-Identifier: Apache-2.0
//
// Euler-Lagrange residual of a strategy profile,
//   r_i = alpha_i sigma^2 X_i - 2 lambda X_i'' - b - gamma sum_{j != i} X_j' - lambda sum_{j != i} X_j''.
#pragma once

#include "liqgame/model.hpp"
#include "liqgame/strategy.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace liqgame {

struct ResidualReport {
    double max_residual = 0.0;
    /// Largest magnitude of any single term of the residual.
    double scale = 0.0;
    /// max |X_i(0) - x_i| / max(1, |x_i|)
    double max_initial_error = 0.0;
    /// max |X_i(T)| / max(1, |x_i|); zero for infinite horizons.
    double max_terminal_error = 0.0;
    std::size_t probes = 0;

    [[nodiscard]] double relative() const;
    [[nodiscard]] bool within(double tol) const { return max_residual <= tol * std::max(1.0, scale); }
};

/// Coefficients of the residual, decoupled from ValidatedProblem so solvers
/// can pass custom drift functions.
struct ResidualModel {
    double lambda = 1.0;
    double gamma = 0.0;
    double sigma = 0.0;
    std::vector<double> alphas;
    std::function<double(double)> drift;
    /// Kinks of the drift; grid stencils straddling one are skipped.
    std::vector<double> breakpoints;

    static ResidualModel from_problem(const ValidatedProblem& problem);
};

/// Exponential sums: analytic derivatives at 100 interior points of [0, T]
/// (infinite horizon: of [0, 10 / |slowest rate|]).
ResidualReport residual_report(const std::vector<ExpSumStrategy>& strategies, const ResidualModel& model,
                               const std::vector<double>& x0);

/// Grid strategies: X' from explicit rates when present, otherwise sixth-order
/// centered differences of positions; X'' by sixth-order differences. Probes
/// are the nodes 3..N-3.
ResidualReport residual_report(const std::vector<GridStrategy>& strategies, const ResidualModel& model,
                               const std::vector<double>& x0);

/// Mixed inputs are sampled onto the grid of the first grid strategy.
ResidualReport residual_report(const std::vector<Strategy>& strategies, const ValidatedProblem& problem);

}  // namespace liqgame
