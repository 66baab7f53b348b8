// SPDX-License-Identifier: Apache-2.0
#include "liqgame/oracle.hpp"

#include "liqgame/error.hpp"

#include <algorithm>
#include <cmath>

namespace liqgame::oracle {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Sum of the other agents' rates on each interval.
std::vector<double> others_rate(const Profile& profile, std::size_t i, std::size_t N, double h) {
    std::vector<double> s(N, 0.0);
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (j == i) continue;
        for (std::size_t m = 0; m < N; ++m) s[m] += (profile[j][m + 1] - profile[j][m]) / h;
    }
    return s;
}

}  // namespace

DiscreteGame::DiscreteGame(const ValidatedProblem& problem, std::size_t N)
    : problem_(problem), N_(N), h_(0.0) {
    if (!problem.horizon.is_finite()) {
        throw Error(ErrorCode::UnsupportedCase, "the discrete oracle needs a finite horizon");
    }
    if (N < kMinGridIntervals) throw Error(ErrorCode::InvalidParam, "grid", "N must be at least 8");
    const double T = problem.horizon.length();
    h_ = T / static_cast<double>(N);
    drift_mid_.resize(N);
    for (std::size_t m = 0; m < N; ++m) drift_mid_[m] = problem.market.drift((m + 0.5) * h_);

    const auto size = static_cast<Eigen::Index>(N - 1);
    const double lam = problem.market.lambda;
    const double s2 = problem.market.sigma * problem.market.sigma;
    for (const auto& agent : problem.agents) {
        // -H = (2 lambda / h) tridiag(-1, 2, -1) + (alpha sigma^2 h / 4) tridiag(1, 2, 1)
        const double k = 2.0 * lam / h_;
        const double r = agent.alpha * s2 * h_ / 4.0;
        std::vector<Eigen::Triplet<double>> t;
        for (Eigen::Index p = 0; p < size; ++p) {
            t.emplace_back(p, p, 2.0 * k + 2.0 * r);
            if (p + 1 < size) {
                t.emplace_back(p, p + 1, -k + r);
                t.emplace_back(p + 1, p, -k + r);
            }
        }
        SpMat A(size, size);
        A.setFromTriplets(t.begin(), t.end());
        auto llt = std::make_shared<Eigen::SimplicialLLT<SpMat>>();
        llt->compute(A);
        if (llt->info() != Eigen::Success) {
            throw Error(ErrorCode::IndefiniteHessian, "discrete objective is not strictly concave");
        }
        factor_.push_back(std::move(llt));
    }
}

double DiscreteGame::objective(std::size_t i, const Profile& profile) const {
    const auto& m = problem_.market;
    const double a = problem_.agents[i].alpha * m.sigma * m.sigma;
    const auto s = others_rate(profile, i, N_, h_);
    const auto& x = profile[i];
    double sum = 0.0;
    for (std::size_t k = 0; k < N_; ++k) {
        const double q = 0.5 * (x[k] + x[k + 1]);
        const double p = (x[k + 1] - x[k]) / h_;
        sum += h_ * (q * (drift_mid_[k] + m.gamma * s[k]) - 0.5 * a * q * q - m.lambda * p * (s[k] + p));
    }
    return sum;
}

std::vector<double> DiscreteGame::best_response(std::size_t i, const Profile& profile) const {
    const auto& m = problem_.market;
    const double a = problem_.agents[i].alpha * m.sigma * m.sigma;
    const double xi = problem_.agents[i].x0;
    const auto s = others_rate(profile, i, N_, h_);
    const auto size = static_cast<Eigen::Index>(N_ - 1);
    Eigen::VectorXd rhs(size);
    for (std::size_t k = 1; k < N_; ++k) {
        const double left = 0.5 * h_ * (drift_mid_[k - 1] + m.gamma * s[k - 1]);
        const double right = 0.5 * h_ * (drift_mid_[k] + m.gamma * s[k]);
        rhs(static_cast<Eigen::Index>(k - 1)) = left + right - m.lambda * (s[k - 1] - s[k]);
    }
    rhs(0) += (2.0 * m.lambda / h_ - a * h_ / 4.0) * xi;
    const Eigen::VectorXd u = factor_[i]->solve(rhs);
    std::vector<double> out(N_ + 1);
    out[0] = xi;
    for (std::size_t k = 1; k < N_; ++k) out[k] = u(static_cast<Eigen::Index>(k - 1));
    out[N_] = 0.0;
    return out;
}

Profile DiscreteGame::initial_profile() const {
    Profile p;
    for (const auto& agent : problem_.agents) {
        std::vector<double> x(N_ + 1);
        for (std::size_t k = 0; k <= N_; ++k) {
            x[k] = agent.x0 * (1.0 - static_cast<double>(k) / static_cast<double>(N_));
        }
        x[N_] = 0.0;
        p.push_back(std::move(x));
    }
    return p;
}

std::vector<GridStrategy> NashResult::strategies(double T) const {
    std::vector<GridStrategy> out;
    for (const auto& x : profile) out.push_back(GridStrategy::liquidating(T, x));
    return out;
}

NashResult iterate_nash(const DiscreteGame& game, Profile profile, const IterationOptions& options) {
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw Error(ErrorCode::InvalidParam, "damping", "must lie in (0, 1]");
    }
    if (profile.size() != game.problem().n()) {
        throw Error(ErrorCode::InvalidParam, "profile", "one position vector per agent");
    }
    NashResult out;
    out.report.damping = options.damping;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const auto response = game.best_response(i, profile);
            auto& x = profile[i];
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double next = options.damping * response[k] + (1.0 - options.damping) * x[k];
                change = std::max(change, std::abs(next - x[k]));
                x[k] = next;
            }
        }
        out.report.iterations = it;
        out.report.final_change = change;
        if (change < options.tolerance) {
            out.report.converged = true;
            break;
        }
    }
    out.profile = std::move(profile);
    return out;
}

NashResult iterate_nash(const DiscreteGame& game, const IterationOptions& options) {
    return iterate_nash(game, game.initial_profile(), options);
}

double ComparisonReport::max_relative() const {
    return relative_gap.empty() ? 0.0 : *std::max_element(relative_gap.begin(), relative_gap.end());
}

double ComparisonReport::max_sup() const {
    return sup_gap.empty() ? 0.0 : *std::max_element(sup_gap.begin(), sup_gap.end());
}

ComparisonReport compare(const std::vector<GridStrategy>& profile, const std::vector<Strategy>& reference) {
    if (profile.size() != reference.size()) {
        throw Error(ErrorCode::InvalidParam, "reference", "profile and reference sizes differ");
    }
    ComparisonReport out;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& g = profile[i];
        if (const auto* r = std::get_if<GridStrategy>(&reference[i]); r != nullptr && !r->same_grid(g)) {
            throw Error(ErrorCode::GridMismatch, "reference is on a different grid");
        }
        double gap = 0.0;
        for (std::size_t k = 0; k <= g.intervals(); ++k) {
            const double ref = eval_strategy(reference[i], g.time(k)).position;
            gap = std::max(gap, std::abs(g.positions()[k] - ref));
        }
        out.sup_gap.push_back(gap);
        out.relative_gap.push_back(gap / std::max(1.0, std::abs(g.positions().front())));
    }
    return out;
}

}  // namespace liqgame::oracle
