// SPDX-License-Identifier: Apache-2.0
//
// Discrete-time game used as an independent check of the continuous-time
// solvers. Positions are piecewise linear on a uniform grid and each agent's
// objective is the Lagrangian sampled at interval midpoints; a best response
// is the exact maximizer of that quadratic form.
#pragma once

#include "liqgame/model.hpp"
#include "liqgame/strategy.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace liqgame::oracle {

/// Node positions for every agent, X_i(t_0..t_N).
using Profile = std::vector<std::vector<double>>;

class DiscreteGame {
public:
    /// Factorizes each agent's negated Hessian once. Throws IndefiniteHessian
    /// if any of them is not positive definite.
    DiscreteGame(const ValidatedProblem& problem, std::size_t N);

    [[nodiscard]] std::size_t intervals() const noexcept { return N_; }
    [[nodiscard]] double step() const noexcept { return h_; }
    [[nodiscard]] const ValidatedProblem& problem() const noexcept { return problem_; }

    /// Discrete objective of agent i for the given profile (without the constant part).
    [[nodiscard]] double objective(std::size_t i, const Profile& profile) const;

    /// Exact maximizer over agent i's interior positions, the others held fixed.
    [[nodiscard]] std::vector<double> best_response(std::size_t i, const Profile& profile) const;

    /// Linear liquidation for every agent.
    [[nodiscard]] Profile initial_profile() const;

private:
    ValidatedProblem problem_;
    std::size_t N_;
    double h_;
    std::vector<double> drift_mid_;
    std::vector<std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>> factor_;
};

struct FixedPointReport {
    std::size_t iterations = 0;
    double final_change = 0.0;
    bool converged = false;
    double damping = 0.5;
};

struct IterationOptions {
    double damping = 0.5;
    double tolerance = 1e-10;
    std::size_t max_iter = 10000;
};

struct NashResult {
    Profile profile;
    FixedPointReport report;

    [[nodiscard]] std::vector<GridStrategy> strategies(double T) const;
};

/// Damped Gauss-Seidel sweeps over agents in index order.
NashResult iterate_nash(const DiscreteGame& game, Profile initial, const IterationOptions& options = {});
NashResult iterate_nash(const DiscreteGame& game, const IterationOptions& options = {});

struct ComparisonReport {
    std::vector<double> sup_gap;
    /// sup_gap[i] / max(1, |x_i|)
    std::vector<double> relative_gap;

    [[nodiscard]] double max_relative() const;
    [[nodiscard]] double max_sup() const;
};

/// Gaps at the grid nodes. Grid references must share the oracle grid
/// (GridMismatch otherwise); exponential sums are evaluated at the nodes.
ComparisonReport compare(const std::vector<GridStrategy>& profile, const std::vector<Strategy>& reference);

}  // namespace liqgame::oracle
