// SPDX-License-Identifier: Apache-2.0
#include "liqgame/polynomial.hpp"

#include "liqgame/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace liqgame {

namespace {

template <class T>
void horner(std::span<const double> a, T z, T& p, T& dp) {
    p = T(0);
    dp = T(0);
    for (std::size_t k = a.size(); k-- > 0;) {
        dp = dp * z + p;
        p = p * z + T(a[k]);
    }
}

template <class T>
T polish(std::span<const double> a, T z) {
    for (int step = 0; step < 2; ++step) {
        T p, dp;
        horner(a, z, p, dp);
        if (std::abs(dp) == 0.0) break;
        const T candidate = z - p / dp;
        T pc, dpc;
        horner(a, candidate, pc, dpc);
        if (!(std::abs(pc) < std::abs(p))) break;
        z = candidate;
    }
    return z;
}

}  // namespace

std::complex<double> evaluate_polynomial(std::span<const double> a, std::complex<double> z) {
    std::complex<double> p, dp;
    horner(a, z, p, dp);
    return p;
}

double evaluate_polynomial(std::span<const double> a, double x) {
    double p, dp;
    horner(a, x, p, dp);
    return p;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> a) {
    if (a.size() < 2 || a.back() == 0.0) {
        throw Error(ErrorCode::InvalidParam, "polynomial", "leading coefficient must be nonzero");
    }
    const auto d = static_cast<Eigen::Index>(a.size() - 1);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) companion(i, d - 1) = -a[static_cast<std::size_t>(i)] / a.back();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::RootFindingFailed, "companion eigenvalue iteration failed");
    }
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) roots.push_back(polish(a, solver.eigenvalues()(i)));
    return roots;
}

std::vector<double> negative_real_roots(std::span<const double> a) {
    std::vector<double> out;
    for (const auto& z : polynomial_roots(a)) {
        const double scale = std::max(1.0, std::abs(z));
        if (std::abs(z.imag()) > 1e-7 * scale) continue;
        const double x = polish(a, z.real());
        if (!(x < -1e-12 * std::max(1.0, std::abs(x)))) continue;
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    std::vector<double> merged;
    for (double x : out) {
        if (!merged.empty() && std::abs(x - merged.back()) <= 1e-12 * std::max(1.0, std::abs(x))) continue;
        merged.push_back(x);
    }
    return merged;
}

}  // namespace liqgame
