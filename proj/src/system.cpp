// SPDX-License-Identifier: Apache-2.0
#include "liqgame/system.hpp"

#include "liqgame/model.hpp"

#include <vector>

namespace liqgame {

namespace {

Eigen::Index dim(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

Eigen::MatrixXd system_matrix(const MarketParams& market, std::span<const double> alphas) {
    const std::size_t n = alphas.size();
    const Eigen::Index m = dim(n);
    const double lambda = market.lambda;
    const double s2 = market.sigma * market.sigma;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(m, m);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) A(i, i) = s2 * alphas[static_cast<std::size_t>(i)];
    const double inv = 1.0 / static_cast<double>(n + 1);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    M.topRightCorner(m, m) = I;
    M.bottomLeftCorner(m, m) = (A - inv * J * A) / lambda;
    M.bottomRightCorner(m, m) = (market.gamma / lambda) * (I - 2.0 * inv * J);
    return M;
}

Eigen::MatrixXd system_matrix_equal(const MarketParams& market, double alpha, std::size_t n) {
    const std::vector<double> alphas(n, alpha);
    return system_matrix(market, alphas);
}

Eigen::MatrixXd system_B(const MarketParams& market, std::size_t n) {
    const Eigen::Index m = dim(n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    B.topRightCorner(m, m) = market.lambda * (Eigen::MatrixXd::Ones(m, m) + Eigen::MatrixXd::Identity(m, m));
    B.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    return B;
}

Eigen::MatrixXd system_B_inverse(const MarketParams& market, std::size_t n) {
    const Eigen::Index m = dim(n);
    const double inv = 1.0 / static_cast<double>(n + 1);
    Eigen::MatrixXd Bi = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    Bi.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    Bi.bottomLeftCorner(m, m) =
        (Eigen::MatrixXd::Identity(m, m) - inv * Eigen::MatrixXd::Ones(m, m)) / market.lambda;
    return Bi;
}

Eigen::MatrixXd system_C(const MarketParams& market, std::span<const double> alphas) {
    const Eigen::Index m = dim(alphas.size());
    const double s2 = market.sigma * market.sigma;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) C(i, i) = s2 * alphas[static_cast<std::size_t>(i)];
    C.topRightCorner(m, m) =
        market.gamma * (Eigen::MatrixXd::Identity(m, m) - Eigen::MatrixXd::Ones(m, m));
    C.bottomRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    return C;
}

Eigen::VectorXd forcing_direction(const MarketParams& market, std::size_t n) {
    const Eigen::Index m = dim(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * m);
    g.tail(m).setConstant(-1.0 / (static_cast<double>(n + 1) * market.lambda));
    return g;
}

}  // namespace liqgame
