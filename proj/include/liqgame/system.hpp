// SPDX-License-Identifier: Apache-2.0
//
// First-order form of the Euler-Lagrange system. With Z = (X, Y), Y = dX/dt,
//   B dZ/dt = C Z + (-b(t) 1, 0),
//   B = [[0, lambda (J + I)], [I, 0]],  C = [[A, gamma (I - J)], [0, I]],
// where A = sigma^2 diag(alpha) and J is the all-ones matrix, so that
//   dZ/dt = M Z + f(t),  M = B^{-1} C,  f(t) = (0, -b(t) / ((n + 1) lambda) 1).
#pragma once

#include <Eigen/Dense>

#include <span>

namespace liqgame {

struct MarketParams;

[[nodiscard]] Eigen::MatrixXd system_matrix(const MarketParams& market, std::span<const double> alphas);
[[nodiscard]] Eigen::MatrixXd system_matrix_equal(const MarketParams& market, double alpha, std::size_t n);

[[nodiscard]] Eigen::MatrixXd system_B(const MarketParams& market, std::size_t n);
[[nodiscard]] Eigen::MatrixXd system_B_inverse(const MarketParams& market, std::size_t n);
[[nodiscard]] Eigen::MatrixXd system_C(const MarketParams& market, std::span<const double> alphas);

/// Direction of the drift forcing: f(t) = b(t) * forcing_direction.
[[nodiscard]] Eigen::VectorXd forcing_direction(const MarketParams& market, std::size_t n);

}  // namespace liqgame
