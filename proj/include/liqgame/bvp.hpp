// SPDX-License-Identifier: Apache-2.0
//
// Two-point boundary value solver for the coupled Euler-Lagrange system and
// the stable-subspace solve for infinite horizons.
#pragma once

#include "liqgame/model.hpp"
#include "liqgame/residual.hpp"
#include "liqgame/strategy.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace liqgame::bvp {

/// dZ/dt = M Z + forcing * b(t), Z = (X, Y).
struct FirstOrderSystem {
    Eigen::MatrixXd M;
    Eigen::VectorXd forcing;
    std::function<double(double)> drift;
    std::vector<double> breakpoints;
    bool drift_is_zero = true;
    std::size_t n = 0;
    ResidualModel residual_model;

    [[nodiscard]] Eigen::VectorXd f(double t) const;
};

/// Builds M and the forcing, checking B B^{-1} = I.
FirstOrderSystem assemble(const ValidatedProblem& problem);

/// Replaces the drift with an arbitrary continuous function (used to test
/// quadrature order with non-polynomial forcing).
FirstOrderSystem with_drift(FirstOrderSystem system, std::function<double(double)> drift,
                            std::vector<double> breakpoints = {});

enum class ShootingMethod {
    Automatic,  ///< single shooting unless the spectral abscissa times T exceeds the threshold
    Single,     ///< fundamental-matrix shooting on e^{TM}
    Balanced,   ///< global system over all grid nodes with the exact step propagator
};

enum class LinearSolve { Direct, LeastSquares };

struct BvpOptions {
    ShootingMethod method = ShootingMethod::Automatic;
    LinearSolve linear_solve = LinearSolve::Direct;
    double quadrature_tolerance = 1e-8;
    double balance_threshold = 8.0;
};

struct BvpSolution {
    std::vector<GridStrategy> strategies;
    /// Y(t_k), one column per agent.
    Eigen::MatrixXd derivative;
    ResidualReport residual;
    double terminal_error_before_snap = 0.0;
    double quadrature_error_estimate = 0.0;
    std::string method;
};

/// Errors: SingularShootingMatrix, QuadratureUnderResolved.
BvpSolution solve_finite(const FirstOrderSystem& system, const Eigen::VectorXd& x0, double T, std::size_t N,
                         const BvpOptions& options = {});

/// k0 u + k1 u' + k2 u'' = rhs(t), u(0) = left, u(T) = 0.
struct ScalarEquation {
    double k0 = 0.0;
    double k1 = 0.0;
    double k2 = -1.0;
};

struct ScalarSolution {
    GridStrategy solution;
    std::vector<double> derivative;
    /// u and u' at the interval midpoints t_k + h/2.
    std::vector<double> midpoint_value;
    std::vector<double> midpoint_derivative;
};

/// rhs is sampled at the half nodes j T / (2N), j = 0..2N.
ScalarSolution solve_scalar(const ScalarEquation& equation, const std::vector<double>& rhs_half_nodes, double left,
                            double T, std::size_t N, const BvpOptions& options = {});
ScalarSolution solve_scalar(const ScalarEquation& equation, const std::function<double(double)>& rhs, double left,
                            double T, std::size_t N, const BvpOptions& options = {});

/// alpha sigma^2 S - (n - 1) gamma S' - (n + 1) lambda S'' = n b, S(0) = sum x_i.
ScalarSolution solve_aggregate(const ValidatedProblem& problem, std::size_t N, const BvpOptions& options = {});

/// alpha sigma^2 X + gamma X' - lambda X'' = b + gamma S' + lambda S'', given S.
ScalarSolution solve_individual(const ValidatedProblem& problem, std::size_t agent, const ScalarSolution& aggregate,
                                std::size_t N, const BvpOptions& options = {});

/// Equal-alpha equilibrium obtained by the aggregate solve followed by one
/// scalar solve per agent.
std::vector<GridStrategy> solve_equal_alpha_composed(const ValidatedProblem& problem, std::size_t N,
                                                     const BvpOptions& options = {});

/// Errors: StableSubspaceDeficient, UnsupportedCase.
std::vector<ExpSumStrategy> solve_infinite(const FirstOrderSystem& system, const Eigen::VectorXd& x0,
                                           const ValidatedProblem& problem);

}  // namespace liqgame::bvp
