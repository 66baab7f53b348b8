// SPDX-License-Identifier: Apache-2.0
#include "liqgame/closed_form.hpp"

#include "liqgame/error.hpp"
#include "liqgame/polynomial.hpp"
#include "liqgame/system.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace liqgame::closed_form {

namespace {

// u(0) = x, u(T) = 0 on the rates mid -/+ half (half > 0). The growing mode is
// anchored at T so no exponent is positive on [0, T].
void append_pinned_mode(std::vector<ExpTerm>& terms, double x, double mid, double half, double T) {
    if (x == 0.0) return;
    const double r_minus = mid - half;
    const double r_plus = mid + half;
    const double d = -std::expm1(-2.0 * half * T);
    terms.push_back({x / d, r_minus, 0.0, 0});
    terms.push_back({-x * std::exp(r_minus * T) / d, r_plus, T, 0});
}

ExpSumStrategy scaled(const ExpSumStrategy& s, double factor, const ExpSumStrategy& other, double other_factor) {
    std::vector<ExpTerm> terms;
    for (auto t : s.terms()) {
        t.coefficient *= factor;
        terms.push_back(t);
    }
    for (auto t : other.terms()) {
        t.coefficient *= other_factor;
        terms.push_back(t);
    }
    return ExpSumStrategy(std::move(terms), s.horizon());
}

void require_zero_drift(const MarketParams& market) {
    if (!market.drift.is_identically_zero()) {
        throw Error(ErrorCode::DriftNotZero, "closed forms require b = 0; use the bvp solver");
    }
}

double require_risk(const MarketParams& market, double alpha) {
    const double a = alpha * market.sigma * market.sigma;
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidParam, "alpha", "closed form requires alpha sigma^2 > 0");
    return a;
}

double common_alpha(const std::vector<AgentSpec>& agents) {
    if (agents.empty()) throw Error(ErrorCode::InvalidParam, "agents", "at least one agent is required");
    for (const auto& a : agents) {
        if (a.alpha != agents.front().alpha) {
            throw Error(ErrorCode::UnsupportedCase, "closed form requires equal risk aversions");
        }
    }
    return agents.front().alpha;
}

double mean_position(const std::vector<AgentSpec>& agents) {
    double s = 0.0;
    for (const auto& a : agents) s += a.x0;
    return s / static_cast<double>(agents.size());
}

}  // namespace

SpectralData spectral(const MarketParams& market, double alpha, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidParam, "agents", "n must be positive");
    const double lambda = market.lambda;
    const double gamma = market.gamma;
    const double a = alpha * market.sigma * market.sigma;
    const double nd = static_cast<double>(n);

    SpectralData s;
    s.theta_hat = std::sqrt(gamma * gamma + 4.0 * a * lambda) / (2.0 * lambda);
    s.rho_hat = std::sqrt((nd - 1.0) * (nd - 1.0) * gamma * gamma + 4.0 * (nd + 1.0) * a * lambda) /
                (2.0 * (nd + 1.0) * lambda);
    s.theta_plus = gamma / (2.0 * lambda) + s.theta_hat;
    s.theta_minus = gamma / (2.0 * lambda) - s.theta_hat;
    const double rho_mid = -(nd - 1.0) * gamma / (2.0 * (nd + 1.0) * lambda);
    s.rho_plus = rho_mid + s.rho_hat;
    s.rho_minus = rho_mid - s.rho_hat;
    s.kappa = std::sqrt(a / (2.0 * lambda));
    if (gamma > 0.0) s.xi = 4.0 * a * lambda / (gamma * gamma);
    s.system_matrix = system_matrix_equal(market, alpha, n);
    return s;
}

std::array<double, 5> two_player_quartic(const MarketParams& market, double alpha1, double alpha2) {
    const double l = market.lambda;
    const double g = market.gamma;
    const double s2 = market.sigma * market.sigma;
    return {
        s2 * s2 * alpha1 * alpha2 / (3.0 * l * l),
        0.0,
        -(g * g + 2.0 * l * s2 * (alpha1 + alpha2)) / (3.0 * l * l),
        -2.0 * g / (3.0 * l),
        1.0,
    };
}

std::array<double, 2> two_player_quartic_roots(const MarketParams& market, double alpha1, double alpha2) {
    const auto coeffs = two_player_quartic(market, alpha1, alpha2);
    const auto roots = negative_real_roots(coeffs);
    if (roots.size() != 2) {
        throw Error(ErrorCode::RootFindingFailed,
                    "expected two distinct negative roots, found " + std::to_string(roots.size()));
    }
    return {roots[0], roots[1]};
}

ExpSumStrategy single_agent_finite(const MarketParams& market, const AgentSpec& agent, double T) {
    const Horizon h = Horizon::finite(T);
    const double a = agent.alpha * market.sigma * market.sigma;
    std::vector<ExpTerm> terms;
    if (a > 0.0) {
        append_pinned_mode(terms, agent.x0, 0.0, std::sqrt(a / (2.0 * market.lambda)), T);
    } else {
        terms.push_back({agent.x0, 0.0, 0.0, 0});
        terms.push_back({-agent.x0 / T, 0.0, 0.0, 1});
    }
    return ExpSumStrategy(std::move(terms), h);
}

std::vector<ExpSumStrategy> equal_alpha_finite(const MarketParams& market, const std::vector<AgentSpec>& agents,
                                               double T) {
    require_zero_drift(market);
    const double alpha = common_alpha(agents);
    require_risk(market, alpha);
    const Horizon h = Horizon::finite(T);
    const std::size_t n = agents.size();
    const SpectralData s = spectral(market, alpha, n);
    const double x_bar = mean_position(agents);

    const double theta_mid = market.gamma / (2.0 * market.lambda);
    const double rho_mid = 0.5 * (s.rho_plus + s.rho_minus);
    std::vector<ExpSumStrategy> out;
    out.reserve(n);
    for (const auto& agent : agents) {
        std::vector<ExpTerm> terms;
        append_pinned_mode(terms, agent.x0 - x_bar, theta_mid, s.theta_hat, T);
        append_pinned_mode(terms, x_bar, rho_mid, s.rho_hat, T);
        out.emplace_back(std::move(terms), h);
    }
    return out;
}

ExpSumStrategy aggregate_finite(const MarketParams& market, double alpha, std::size_t n, double x_sum, double T) {
    require_zero_drift(market);
    require_risk(market, alpha);
    const SpectralData s = spectral(market, alpha, n);
    // n x_bar / (2 sinh(rho_hat T)) (e^{rho_hat T} e^{rho_- t} - e^{-rho_hat T} e^{rho_+ t})
    const double d = -std::expm1(-2.0 * s.rho_hat * T);
    std::vector<ExpTerm> terms{
        {x_sum / d, s.rho_minus, 0.0, 0},
        {-x_sum * std::exp((s.rho_plus - 2.0 * s.rho_hat) * T) / d, s.rho_plus, T, 0},
    };
    return ExpSumStrategy(std::move(terms), Horizon::finite(T));
}

std::pair<ExpSumStrategy, ExpSumStrategy> two_player_finite(const MarketParams& market, const AgentSpec& agent1,
                                                            const AgentSpec& agent2, double T) {
    require_zero_drift(market);
    const double alpha = common_alpha({agent1, agent2});
    const double a = require_risk(market, alpha);
    const double l = market.lambda;
    const double g = market.gamma;
    const Horizon h = Horizon::finite(T);

    // Sigma = (x1 + x2) e^{-g t / 6l} sinh((T - t) w / 6l) / sinh(T w / 6l), w = sqrt(g^2 + 12 a l)
    std::vector<ExpTerm> sigma_terms;
    append_pinned_mode(sigma_terms, agent1.x0 + agent2.x0, -g / (6.0 * l), std::sqrt(g * g + 12.0 * a * l) / (6.0 * l),
                       T);
    // Delta = (x1 - x2) e^{g t / 2l} sinh((T - t) v / 2l) / sinh(T v / 2l), v = sqrt(g^2 + 4 a l)
    std::vector<ExpTerm> delta_terms;
    append_pinned_mode(delta_terms, agent1.x0 - agent2.x0, g / (2.0 * l), std::sqrt(g * g + 4.0 * a * l) / (2.0 * l),
                       T);
    const ExpSumStrategy sigma(std::move(sigma_terms), h);
    const ExpSumStrategy delta(std::move(delta_terms), h);
    return {scaled(sigma, 0.5, delta, 0.5), scaled(sigma, 0.5, delta, -0.5)};
}

ExpSumStrategy mean_field_strategy(const MarketParams& market, double alpha, double x_i, double x_bar, double T) {
    require_zero_drift(market);
    require_risk(market, alpha);
    if (!(market.gamma > 0.0)) throw Error(ErrorCode::GammaZero, "mean-field limit requires gamma > 0");
    const SpectralData s = spectral(market, alpha, 1);
    const double rate = market.gamma / market.lambda;
    std::vector<ExpTerm> terms;
    append_pinned_mode(terms, x_i - x_bar, market.gamma / (2.0 * market.lambda), s.theta_hat, T);
    if (x_bar != 0.0) {
        const double d = -std::expm1(-rate * T);
        terms.push_back({x_bar / d, -rate, 0.0, 0});
        terms.push_back({-x_bar * std::exp(-rate * T) / d, 0.0, 0.0, 0});
    }
    return ExpSumStrategy(std::move(terms), Horizon::finite(T));
}

ExpSumStrategy equal_alpha_infinite_agent(const MarketParams& market, double alpha, std::size_t n, double x_i,
                                          double x_bar) {
    require_risk(market, alpha);
    require_zero_drift(market);
    const SpectralData s = spectral(market, alpha, n);
    std::vector<ExpTerm> terms;
    if (s.theta_minus == s.rho_minus) {
        terms.push_back({x_i, s.rho_minus, 0.0, 0});
    } else {
        terms.push_back({x_i - x_bar, s.theta_minus, 0.0, 0});
        terms.push_back({x_bar, s.rho_minus, 0.0, 0});
    }
    return ExpSumStrategy(std::move(terms), Horizon::infinite());
}

std::vector<ExpSumStrategy> equal_alpha_infinite(const MarketParams& market, const std::vector<AgentSpec>& agents) {
    const double alpha = common_alpha(agents);
    const double x_bar = mean_position(agents);
    std::vector<ExpSumStrategy> out;
    out.reserve(agents.size());
    for (const auto& agent : agents) {
        out.push_back(equal_alpha_infinite_agent(market, alpha, agents.size(), agent.x0, x_bar));
    }
    return out;
}

TwoPlayerInfinite two_player_infinite(const MarketParams& market, const AgentSpec& agent1, const AgentSpec& agent2) {
    require_zero_drift(market);
    require_risk(market, agent1.alpha);
    require_risk(market, agent2.alpha);
    if (agent1.alpha == agent2.alpha) {
        throw Error(ErrorCode::InvalidParam, "alpha", "two_player_infinite requires distinct risk aversions");
    }
    const auto roots = two_player_quartic_roots(market, agent1.alpha, agent2.alpha);

    // Eigenvectors (w, tau w) of M: (L + tau G - tau^2 I) w = 0 with L, G the
    // lower blocks of M.
    const std::array<double, 2> alphas{agent1.alpha, agent2.alpha};
    const Eigen::MatrixXd M = system_matrix(market, alphas);
    const Eigen::Matrix2d L = M.block<2, 2>(2, 0);
    const Eigen::Matrix2d G = M.block<2, 2>(2, 2);
    Eigen::Matrix2d W;
    for (int k = 0; k < 2; ++k) {
        const double tau = roots[static_cast<std::size_t>(k)];
        const Eigen::Matrix2d K = L + tau * G - tau * tau * Eigen::Matrix2d::Identity();
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(K, Eigen::ComputeFullV);
        W.col(k) = svd.matrixV().col(1);
    }
    if (std::abs(W.determinant()) <= 1e-12) {
        throw Error(ErrorCode::DegenerateEigenbasis, "stable eigenvectors are linearly dependent");
    }
    const Eigen::Vector2d c = W.partialPivLu().solve(Eigen::Vector2d(agent1.x0, agent2.x0));

    auto build = [&](int row) {
        std::vector<ExpTerm> terms{
            {c(0) * W(row, 0), roots[0], 0.0, 0},
            {c(1) * W(row, 1), roots[1], 0.0, 0},
        };
        return ExpSumStrategy(std::move(terms), Horizon::infinite());
    };
    return {build(0), build(1), roots};
}

std::vector<double> finite_to_infinite_convergence(const MarketParams& market, const std::vector<AgentSpec>& agents,
                                                   const std::vector<double>& probes,
                                                   const std::vector<double>& horizons) {
    const auto limit = equal_alpha_infinite(market, agents);
    std::vector<double> gaps;
    gaps.reserve(horizons.size());
    for (double T : horizons) {
        const auto finite = equal_alpha_finite(market, agents, T);
        double gap = 0.0;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            for (double t : probes) {
                if (t < 0.0 || t > T) continue;
                gap = std::max(gap, std::abs(finite[i].position(t) - limit[i].position(t)));
            }
        }
        gaps.push_back(gap);
    }
    return gaps;
}

}  // namespace liqgame::closed_form
